//! Verification suites: carry identities, Jacobi-sum valuations, the Laplacian
//! action on the character basis, the block matrices of `K = 2A + I` for the
//! Paley and Peisert graphs, and the Smith-form comparison of their
//! generalized adjacency matrices when `q = p^2`.
//!
//! Every identity is checked in `GR(p^k, n)` against a direct application of
//! the integer matrix, so a wrong display shows up as a concrete coordinate.

use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::critgrp::{
    all_blocks, block_divisors_local, block_matrix_mi, is_palindromic, m0_divisors_local, m0_matrix,
    p_profile_formula, p_rank_formula,
};
use crate::digits::CarryContext;
use crate::error::{Error, Result};
use crate::ffield::{FieldTable, GraphKind};
use crate::gring::{jacobi_quartic_exact, GaloisRing, GaussInt, GrElem, GrMatrix, GrVector};
use crate::graphs::{adjacency, generalized, is_connected, laplacian, srg_check, IntMatrix, SrgParams};
use crate::zlinalg::{big_to_string, rank_mod_p, smith_normal_form, AbelianGroup};

/// Failures listed per check; the rest are only counted.
const MAX_LISTED: usize = 16;
/// Largest `q` for which the blocks suite eliminates over `GF(p)` directly.
const DIRECT_RANK_LIMIT: u64 = 1024;
/// Largest `q` for which the blocks suite recomputes every block in the ring.
const LOCAL_BLOCK_LIMIT: u64 = 2401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Carries,
    Stickelberger,
    Action,
    Blocks,
    Berndt,
    Canon,
    M0,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Carries,
        Suite::Stickelberger,
        Suite::Action,
        Suite::Blocks,
        Suite::Berndt,
        Suite::Canon,
        Suite::M0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Carries => "carries",
            Suite::Stickelberger => "stickelberger",
            Suite::Action => "action",
            Suite::Blocks => "blocks",
            Suite::Berndt => "berndt",
            Suite::Canon => "canon",
            Suite::M0 => "m0",
        }
    }

    /// Suites that only make sense for `q = p^2`.
    pub fn needs_p_squared(self) -> bool {
        matches!(self, Suite::Berndt | Suite::Canon | Suite::M0)
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

/// Outcome of one named identity over all its cases.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failed: u64,
    pub failures: Vec<Value>,
}

impl Check {
    pub fn new(name: &str) -> Self {
        Check { name: name.to_string(), passed: true, cases: 0, failed: 0, failures: Vec::new() }
    }

    pub fn record(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            self.failed += 1;
            if self.failures.len() < MAX_LISTED {
                self.failures.push(detail());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub q: u64,
    pub precision: Option<u32>,
    pub checks: Vec<Check>,
    /// Observations that are reported but not asserted.
    pub notes: Vec<Value>,
}

impl SuiteReport {
    fn new(suite: &str, q: u64, precision: Option<u32>) -> Self {
        SuiteReport { suite: suite.to_string(), q, precision, checks: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serialises")
    }
}

fn elem_json(e: &GrElem) -> Value {
    json!(e.coeffs())
}

/// Indices `1..=q-2` other than `r, 2r, 3r`.
fn generic_indices(ctx: &CarryContext) -> impl Iterator<Item = u64> + '_ {
    let r = ctx.r();
    (1..ctx.q() - 1).filter(move |i| i % r != 0)
}

/// Ring of default precision `2t + 2` unless overridden.
pub fn ring_for(p: u64, t: u32, precision: Option<u32>) -> Result<GaloisRing> {
    let field = Arc::new(FieldTable::new(p, 2 * t)?);
    GaloisRing::new(field, precision.unwrap_or(2 * t + 2))
}

/// Pairs `(c(i, r), c(q-1-i, r))` at the indices where they do not sum to `2t`.
pub fn conjugation_with_r_counterexamples(ctx: &CarryContext) -> Vec<(u64, u32, u32)> {
    let n = ctx.q() - 1;
    generic_indices(ctx)
        .map(|i| (i, ctx.c(i, ctx.r()), ctx.c(n - i, ctx.r())))
        .filter(|&(_, a, b)| a + b != 2 * ctx.t())
        .collect()
}

pub fn suite_carries(ctx: &CarryContext) -> SuiteReport {
    let (q, r, t) = (ctx.q(), ctx.r(), ctx.t());
    let mut rep = SuiteReport::new("carries", q, None);
    let mut four_t = Check::new("cycle_sum_4t");
    let mut halves = Check::new("half_cycle_balance");
    let mut conj = Check::new("conjugation_2t");
    for i in generic_indices(ctx) {
        let l = [ctx.c(i, r), ctx.c(i + r, 3 * r), ctx.c(i + 2 * r, r), ctx.c(i + 3 * r, 3 * r)];
        four_t.record(l.iter().sum::<u32>() == 4 * t, || json!({"i": i, "values": l}));
        let lhs = ctx.c(i, r) + ctx.c(i + 2 * r, r);
        let rhs = ctx.c(i, 3 * r) + ctx.c(i + 2 * r, 3 * r);
        halves.record(lhs == rhs, || json!({"i": i, "lhs": lhs, "rhs": rhs}));
        let (a, b) = (ctx.c(i, r), ctx.c(q - 1 - i, 3 * r));
        conj.record(a + b == 2 * t, || json!({"i": i, "c_i_r": a, "c_conj_3r": b}));
    }
    rep.checks.extend([four_t, halves, conj]);
    let bad = conjugation_with_r_counterexamples(ctx);
    rep.notes.push(json!({
        "identity": "c(i,r) + c(q-1-i,r) = 2t",
        "counterexamples": bad.len(),
        "first": bad.first().map(|&(i, a, b)| json!({"i": i, "c_i_r": a, "c_conj_r": b})),
    }));
    rep
}

/// `v_p(J(i, j)) = c(i, j)` for every `i` and `j` in `{r, 2r, 3r}` with
/// `i, i + j` nonzero modulo `q - 1`.
pub fn suite_stickelberger(ctx: &CarryContext, g: &GaloisRing) -> SuiteReport {
    let (q, r) = (ctx.q(), ctx.r());
    let mut rep = SuiteReport::new("stickelberger", q, Some(g.precision()));
    let rows: Vec<(u64, u64, Option<u32>, u32)> = (1..q - 1)
        .into_par_iter()
        .flat_map_iter(|i| {
            [r, 2 * r, 3 * r]
                .into_iter()
                .filter(move |j| (i + j) % (q - 1) != 0)
                .map(move |j| (i, j, g.valuation(&g.jacobi(i as i64, j as i64)), ctx.c(i, j)))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut chk = Check::new("valuation_equals_carries");
    for (i, j, v, c) in rows {
        chk.record(v == Some(c), || json!({"i": i, "j": j, "valuation": v, "carries": c}));
    }
    rep.checks.push(chk);
    rep
}

/// Integer matrix acting on vectors over the ring.
struct Action<'a> {
    g: &'a GaloisRing,
    n: usize,
    entries: Vec<i64>,
}

impl<'a> Action<'a> {
    fn new(g: &'a GaloisRing, m: &IntMatrix) -> Self {
        let entries = m.to_i64().expect("small integer matrix");
        Action { g, n: m.rows(), entries }
    }

    fn apply(&self, v: &GrVector) -> GrVector {
        let g = self.g;
        let coords = (0..self.n)
            .map(|z| {
                let row = &self.entries[z * self.n..(z + 1) * self.n];
                row.iter()
                    .zip(&v.coords)
                    .filter(|(&m, _)| m != 0)
                    .fold(g.zero(), |acc, (&m, x)| g.add(&acc, &g.scale(x, m)))
            })
            .collect();
        GrVector { coords }
    }
}

/// Coefficient of `e_j` in `w`: `(q-1)^{-1} sum_{x != 0} w[x] T^j(x)`.
fn char_coeff(g: &GaloisRing, w: &GrVector, j: i64) -> GrElem {
    let f = g.field();
    let nq = (f.q() - 1) as i64;
    let inv = g.inverse(&g.from_int(nq)).expect("q - 1 is a unit");
    let mut acc = g.zero();
    for (x, wx) in w.coords.iter().enumerate() {
        if let Some(l) = f.log(x as u32) {
            if !g.is_zero(wx) {
                acc = g.add(&acc, &g.mul(wx, &g.teich(j * l as i64)));
            }
        }
    }
    g.mul(&acc, &inv)
}

/// Coordinates of `w` in the basis `e_j`, `j` in `js`, or `None` if `w` is
/// outside their span.
fn coords_in_e(g: &GaloisRing, w: &GrVector, js: &[i64]) -> Option<Vec<GrElem>> {
    let cs: Vec<GrElem> = js.iter().map(|&j| char_coeff(g, w, j)).collect();
    let mut back = g.vec_zero();
    for (&j, c) in js.iter().zip(&cs) {
        back = g.vec_axpy(&back, c, &g.basis_vector_e(j));
    }
    (back == *w).then_some(cs)
}

/// Coordinates of `w` in `1, [0], e_r, e_{2r}, e_{3r}`.
fn coords_in_m0(g: &GaloisRing, w: &GrVector, r: i64) -> Option<Vec<GrElem>> {
    let c0 = char_coeff(g, w, 0);
    let b = g.sub(&w.coords[0], &c0);
    let cs: Vec<GrElem> = [r, 2 * r, 3 * r].iter().map(|&j| char_coeff(g, w, j)).collect();
    let mut back = g.vec_axpy(&g.vec_scale(&c0, &g.all_ones()), &b, &g.point_vector(0));
    for (j, c) in [r, 2 * r, 3 * r].iter().zip(&cs) {
        back = g.vec_axpy(&back, c, &g.basis_vector_e(*j));
    }
    if back != *w {
        return None;
    }
    Some([vec![c0, b], cs].concat())
}

fn matrix_from_columns(g: &GaloisRing, cols: &[Vec<GrElem>]) -> GrMatrix {
    let n = cols.len();
    let mut m = g.matrix_zero(cols[0].len(), n);
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    m
}

fn matrix_json(m: &GrMatrix) -> Value {
    json!((0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j).coeffs().to_vec()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// `2 L v` minus the right-hand side for the Laplacian on the character basis,
/// checked coordinatewise.
pub fn suite_action(ctx: &CarryContext, g: &GaloisRing) -> Result<SuiteReport> {
    let (q, r) = (ctx.q(), ctx.r() as i64);
    let field = g.field();
    let lap = laplacian(&adjacency(field, GraphKind::Peisert)?)?;
    let act = Action::new(g, &lap);
    let two_l = |v: &GrVector| g.vec_scale(&g.from_int(2), &act.apply(v));
    let mut rep = SuiteReport::new("action", q, Some(g.precision()));
    let (al, ab) = (g.alpha(), g.alpha_bar());
    let qe = g.from_int(q as i64);
    let e = |j: i64| g.basis_vector_e(j);
    let neg = |x: &GrElem| g.neg(x);
    let combo = |terms: &[(GrElem, GrVector)]| {
        terms.iter().fold(g.vec_zero(), |acc, (s, v)| g.vec_axpy(&acc, s, v))
    };
    let mismatch = |lhs: &GrVector, rhs: &GrVector| -> Value {
        let bad: Vec<Value> = lhs
            .coords
            .iter()
            .zip(&rhs.coords)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .take(4)
            .map(|(x, (a, b))| json!({"vertex": x, "direct": elem_json(a), "formula": elem_json(b)}))
            .collect();
        json!(bad)
    };

    let mut lei = Check::new("character_vector_action");
    let idx: Vec<i64> = (1..q as i64 - 1).filter(|&i| i != r && i != 3 * r).collect();
    let results: Vec<(i64, GrVector, GrVector)> = idx
        .par_iter()
        .map(|&i| {
            let lhs = two_l(&e(i));
            let rhs = combo(&[
                (qe.clone(), e(i)),
                (neg(&g.mul(&ab, &g.jacobi(i, r))), e(i + r)),
                (neg(&g.mul(&al, &g.jacobi(i, 3 * r))), e(i + 3 * r)),
            ]);
            (i, lhs, rhs)
        })
        .collect();
    for (i, lhs, rhs) in &results {
        lei.record(lhs == rhs, || json!({"i": i, "coordinates": mismatch(lhs, rhs)}));
    }

    let ones = g.all_ones();
    let pt0 = g.point_vector(0);
    let fixed: [(&str, GrVector, GrVector); 5] = [
        ("ones", two_l(&ones), g.vec_zero()),
        (
            "point_zero",
            two_l(&pt0),
            combo(&[(g.from_int(-1), ones.clone()), (qe.clone(), pt0.clone()), (neg(&ab), e(r)), (neg(&al), e(3 * r))]),
        ),
        (
            "e_r",
            two_l(&e(r)),
            combo(&[
                (al.clone(), ones.clone()),
                (neg(&g.mul(&qe, &al)), pt0.clone()),
                (qe.clone(), e(r)),
                (neg(&g.mul(&ab, &g.jacobi(r, r))), e(2 * r)),
            ]),
        ),
        (
            "e_2r",
            two_l(&e(2 * r)),
            combo(&[
                (neg(&g.mul(&al, &g.jacobi(2 * r, 3 * r))), e(r)),
                (qe.clone(), e(2 * r)),
                (neg(&g.mul(&ab, &g.jacobi(2 * r, r))), e(3 * r)),
            ]),
        ),
        (
            "e_3r",
            two_l(&e(3 * r)),
            combo(&[
                (ab.clone(), ones.clone()),
                (neg(&g.mul(&qe, &ab)), pt0.clone()),
                (neg(&g.mul(&al, &g.jacobi(3 * r, 3 * r))), e(2 * r)),
                (qe.clone(), e(3 * r)),
            ]),
        ),
    ];
    let mut ler = Check::new("fixed_summand_action");
    for (name, lhs, rhs) in &fixed {
        ler.record(lhs == rhs, || json!({"vector": name, "coordinates": mismatch(lhs, rhs)}));
    }

    // The 4x4 and 5x5 displays used by the closed form, against the direct action.
    let mut mi = Check::new("block_display");
    let reps: Vec<u64> = (1..ctx.r()).collect();
    let blocks: Vec<(u64, Option<GrMatrix>, GrMatrix)> = reps
        .par_iter()
        .map(|&i| {
            let js: Vec<i64> = (0..4).map(|s| i as i64 + s * r).collect();
            let cols: Option<Vec<Vec<GrElem>>> = js.iter().map(|&j| coords_in_e(g, &two_l(&e(j)), &js)).collect();
            (i, cols.map(|c| matrix_from_columns(g, &c)), block_matrix_mi(ctx, i, g))
        })
        .collect();
    for (i, direct, display) in &blocks {
        mi.record(direct.as_ref() == Some(display), || {
            json!({"i": i, "direct": direct.as_ref().map(matrix_json), "display": matrix_json(display)})
        });
    }
    let mut m0 = Check::new("fixed_summand_display");
    let basis = [ones.clone(), pt0.clone(), e(r), e(2 * r), e(3 * r)];
    let cols: Option<Vec<Vec<GrElem>>> = basis.iter().map(|v| coords_in_m0(g, &two_l(v), r)).collect();
    let direct = cols.map(|c| matrix_from_columns(g, &c));
    let display = m0_matrix(ctx, g);
    m0.record(direct.as_ref() == Some(&display), || {
        json!({"direct": direct.as_ref().map(matrix_json), "display": matrix_json(&display)})
    });
    rep.checks.extend([lei, ler, mi, m0]);
    Ok(rep)
}

/// Closed form against ring elimination block by block, plus the profile
/// identities.
pub fn suite_blocks(ctx: &CarryContext, g: Option<&GaloisRing>) -> Result<SuiteReport> {
    let (q, t) = (ctx.q(), ctx.t());
    let mut rep = SuiteReport::new("blocks", q, g.map(|g| g.precision()));
    let blocks = all_blocks(ctx)?;
    let mut sums = Check::new("block_exponent_sum");
    for b in &blocks {
        let s = b.exponents.iter().sum::<u32>();
        sums.record(s == 4 * t, || json!({"i": b.rep, "exponents": b.exponents}));
    }
    rep.checks.push(sums);
    let ties = blocks.iter().filter(|b| b.tie).count();
    rep.notes.push(json!({"equal_minimum_blocks": ties}));

    match g {
        Some(g) if q <= LOCAL_BLOCK_LIMIT => {
            let mut agree = Check::new("closed_form_matches_ring");
            let local: Vec<Result<_>> =
                blocks.par_iter().map(|b| block_divisors_local(ctx, b.rep, g)).collect();
            for (b, l) in blocks.iter().zip(local) {
                let l = l?;
                let mut f = b.exponents;
                f.sort_unstable();
                agree.record(f == l.exponents && l.chosen.is_some(), || {
                    json!({"i": b.rep, "closed_form": f, "ring": l.exponents, "list1": b.list1, "list2": b.list2})
                });
            }
            let mut m0 = Check::new("fixed_summand_divisors");
            let got = m0_divisors_local(ctx, g);
            m0.record(matches!(&got, Ok(r) if r.exponents == [0, 0, t, t]), || json!({"ring": format!("{got:?}")}));
            rep.checks.extend([agree, m0]);
        }
        _ => rep.notes.push(json!({"skipped": "ring elimination of blocks", "q": q})),
    }

    let prof = p_profile_formula(ctx, &blocks);
    let mut pal = Check::new("palindromic");
    pal.record(is_palindromic(&prof, t), || json!({"multiplicities": prof.mult}));
    let mut order = Check::new("order_identity");
    let total = prof.total_exponent();
    order.record(total == t as u64 * (q - 3), || json!({"sum_j_m_j": total, "expected": t as u64 * (q - 3)}));
    let mut prank = Check::new("p_rank_closed_form");
    let (formula, m0) = (p_rank_formula(ctx), prof.m(0));
    prank.record(formula == m0, || json!({"formula": formula, "m0": m0}));
    rep.checks.extend([pal, order, prank]);
    if q <= DIRECT_RANK_LIMIT {
        let field = FieldTable::new(ctx.p(), ctx.m())?;
        let lap = laplacian(&adjacency(&field, GraphKind::Peisert)?)?;
        let direct = rank_mod_p(&lap, ctx.p()) as u64;
        let mut chk = Check::new("p_rank_direct");
        chk.record(direct == formula, || json!({"rank_mod_p": direct, "formula": formula}));
        rep.checks.push(chk);
    }
    Ok(rep)
}

fn require_p_squared(ctx: &CarryContext) -> Result<()> {
    if ctx.t() != 1 {
        return Err(Error::InvalidParameter(format!("this check needs q = p^2, got q = {}", ctx.q())));
    }
    Ok(())
}

/// The four quartic Jacobi sums equal `p`, exactly and in the ring, and
/// `J(i,r)J(i+r,r) = J(i,3r)J(i+3r,3r)` for every generic `i`.
pub fn verify_berndt(ctx: &CarryContext, g: &GaloisRing) -> Result<SuiteReport> {
    require_p_squared(ctx)?;
    let (p, r) = (ctx.p() as i64, ctx.r() as i64);
    let mut rep = SuiteReport::new("berndt", ctx.q(), Some(g.precision()));
    let mut exact = Check::new("quartic_sums_exact");
    let mut ring = Check::new("quartic_sums_ring");
    let pe = g.from_int(p);
    for (i, j) in [(r, r), (3 * r, 3 * r), (r, 2 * r), (3 * r, 2 * r)] {
        let z = jacobi_quartic_exact(g.field(), i, j)?;
        exact.record(z == GaussInt { re: p, im: 0 }, || json!({"i": i, "j": j, "value": z.to_string()}));
        let v = g.jacobi(i, j);
        ring.record(v == pe, || json!({"i": i, "j": j, "value": elem_json(&v)}));
    }
    let mut prod = Check::new("product_identity");
    let idx: Vec<i64> = generic_indices(ctx).map(|i| i as i64).collect();
    let rows: Vec<(i64, GrElem, GrElem)> = idx
        .par_iter()
        .map(|&i| {
            let lhs = g.mul(&g.jacobi(i, r), &g.jacobi(i + r, r));
            let rhs = g.mul(&g.jacobi(i, 3 * r), &g.jacobi(i + 3 * r, 3 * r));
            (i, lhs, rhs)
        })
        .collect();
    for (i, l, rr) in &rows {
        prod.record(l == rr, || json!({"i": i, "lhs": elem_json(l), "rhs": elem_json(rr)}));
    }
    rep.checks.extend([exact, ring, prod]);
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    /// `K = 2A + I` of the Paley graph on `M_i`, basis `e_i, e_{i+2r}, e_{i+r}, e_{i+3r}`.
    KPaley,
    /// `K* = 2A* + I` of the Peisert graph on `M_i`, same basis.
    KPeisert,
    /// `2 mu_L` of the Peisert graph on `M_i`, basis `e_i, e_{i+r}, e_{i+2r}, e_{i+3r}`.
    LBlock,
    /// `K` on `M_0`, basis `1, [0], e_{2r}, e_r, e_{3r}`.
    M0Paley,
    /// `K*` on `M_0`, basis `1, [0], e_r, e_{2r}, e_{3r}`.
    M0Peisert,
}

/// Block matrices with columns the images of the basis vectors. `i` is
/// ignored for the `M_0` kinds.
pub fn block_matrix(ctx: &CarryContext, i: i64, which: BlockKind, g: &GaloisRing) -> GrMatrix {
    let r = ctx.r() as i64;
    let (al, ab) = (g.alpha(), g.alpha_bar());
    let j = |a: i64, b: i64| g.jacobi(a, b);
    let m = |x: &GrElem, y: &GrElem| g.mul(x, y);
    let z = g.zero();
    let qe = g.from_int(ctx.q() as i64);
    let rows: Vec<Vec<GrElem>> = match which {
        BlockKind::LBlock => return block_matrix_mi(ctx, i.rem_euclid(ctx.q() as i64 - 1) as u64, g),
        BlockKind::KPaley => vec![
            vec![z.clone(), j(i + 2 * r, 2 * r), z.clone(), z.clone()],
            vec![j(i, 2 * r), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), j(i + 3 * r, 2 * r)],
            vec![z.clone(), z.clone(), j(i + r, 2 * r), z.clone()],
        ],
        BlockKind::KPeisert => vec![
            vec![z.clone(), z.clone(), m(&al, &j(i + r, 3 * r)), m(&ab, &j(i + 3 * r, r))],
            vec![z.clone(), z.clone(), m(&ab, &j(i + r, r)), m(&al, &j(i + 3 * r, 3 * r))],
            vec![m(&ab, &j(i, r)), m(&al, &j(i + 2 * r, 3 * r)), z.clone(), z.clone()],
            vec![m(&al, &j(i, 3 * r)), m(&ab, &j(i + 2 * r, r)), z.clone(), z.clone()],
        ],
        BlockKind::M0Paley => vec![
            vec![qe.clone(), g.one(), g.from_int(-1), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), qe.clone(), z.clone(), z.clone()],
            vec![z.clone(), g.one(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), z.clone(), j(3 * r, 2 * r)],
            vec![z.clone(), z.clone(), z.clone(), j(r, 2 * r), z.clone()],
        ],
        BlockKind::M0Peisert => vec![
            vec![qe.clone(), g.one(), g.neg(&al), z.clone(), g.neg(&ab)],
            vec![z.clone(), z.clone(), m(&qe, &al), z.clone(), m(&qe, &ab)],
            vec![z.clone(), ab.clone(), z.clone(), m(&al, &j(2 * r, 3 * r)), z.clone()],
            vec![z.clone(), z.clone(), m(&ab, &j(r, r)), z.clone(), m(&al, &j(3 * r, 3 * r))],
            vec![z.clone(), al.clone(), z.clone(), m(&ab, &j(2 * r, r)), z.clone()],
        ],
    };
    let n = rows.len();
    GrMatrix { rows: n, cols: n, entries: rows.into_iter().flatten().collect() }
}

/// Basis of `M_i` (or `M_0`) in the order used by `block_matrix`.
fn block_basis(ctx: &CarryContext, i: i64, which: BlockKind, g: &GaloisRing) -> Vec<GrVector> {
    let r = ctx.r() as i64;
    let e = |j: i64| g.basis_vector_e(j);
    match which {
        BlockKind::KPaley | BlockKind::KPeisert => vec![e(i), e(i + 2 * r), e(i + r), e(i + 3 * r)],
        BlockKind::LBlock => vec![e(i), e(i + r), e(i + 2 * r), e(i + 3 * r)],
        BlockKind::M0Paley => vec![g.all_ones(), g.point_vector(0), e(2 * r), e(r), e(3 * r)],
        BlockKind::M0Peisert => vec![g.all_ones(), g.point_vector(0), e(r), e(2 * r), e(3 * r)],
    }
}

/// Matrix of `K = 2A + I` in the given basis, by direct action; `None` if an
/// image leaves the span.
fn direct_k_matrix(
    g: &GaloisRing,
    act: &Action,
    basis: &[GrVector],
    in_basis: impl Fn(&GrVector) -> Option<Vec<GrElem>>,
) -> Option<GrMatrix> {
    let cols: Option<Vec<Vec<GrElem>>> = basis.iter().map(|v| in_basis(&act.apply(v))).collect();
    cols.map(|c| matrix_from_columns(g, &c))
}

fn k_matrix(field: &FieldTable, kind: GraphKind) -> Result<IntMatrix> {
    let a = adjacency(field, kind)?;
    generalized(&a, 2, 1, 0)
}

/// Rank over the residue field.
fn residue_rank(g: &GaloisRing, m: &GrMatrix) -> usize {
    let f = g.field();
    let mut a: Vec<u32> = m.entries.iter().map(|x| g.reduce(x)).collect();
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| a[i * cols + c] != 0) else { continue };
        for j in 0..cols {
            a.swap(pr * cols + j, rank * cols + j);
        }
        let inv = f.inv(a[rank * cols + c]).expect("nonzero pivot");
        for i in 0..rows {
            if i == rank || a[i * cols + c] == 0 {
                continue;
            }
            let s = f.mul(a[i * cols + c], inv);
            for j in 0..cols {
                let v = f.mul(s, a[rank * cols + j]);
                a[i * cols + j] = f.sub(a[i * cols + j], v);
            }
        }
        rank += 1;
    }
    rank
}

/// Exponent profile of the canonical form with residue rank `rank`.
pub fn canonical_exponents(rank: usize) -> Option<[u32; 4]> {
    match rank {
        0 => Some([1, 1, 1, 1]),
        1 => Some([0, 1, 1, 2]),
        2 => Some([0, 0, 2, 2]),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonReport {
    pub rep: u64,
    pub rank_paley: usize,
    pub rank_peisert: usize,
    pub exponents_paley: Vec<u32>,
    pub exponents_peisert: Vec<u32>,
    /// Rank in `{0, 1, 2}`, equal for both, and both blocks carry the
    /// matching canonical exponents.
    pub consistent: bool,
}

/// Residue ranks and elementary divisors of `K_i` and `K*_i`.
pub fn canonical_profile(ctx: &CarryContext, i: u64, g: &GaloisRing) -> Result<CanonReport> {
    require_p_squared(ctx)?;
    let kp = block_matrix(ctx, i as i64, BlockKind::KPaley, g);
    let ks = block_matrix(ctx, i as i64, BlockKind::KPeisert, g);
    let (rank_paley, rank_peisert) = (residue_rank(g, &kp), residue_rank(g, &ks));
    let (dp, ds) = (g.elementary_divisors(&kp), g.elementary_divisors(&ks));
    let expected = canonical_exponents(rank_paley);
    let consistent = rank_paley == rank_peisert
        && dp.residual == 0
        && ds.residual == 0
        && expected.is_some_and(|e| dp.exponents == e && ds.exponents == e);
    Ok(CanonReport {
        rep: i,
        rank_paley,
        rank_peisert,
        exponents_paley: dp.exponents,
        exponents_peisert: ds.exponents,
        consistent,
    })
}

/// Valuations of `K*_i` read as `[[0,0,d+D,b+D],[0,0,c+D,a+D],[a,b,0,0],[c,d,0,0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValuationPattern {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub shift: i64,
    /// `(s(i+r) - s(i) + s(i+3r) - s(i+2r)) / (p - 1)`.
    pub shift_from_digits: i64,
    /// The four upper-right entries give the same shift.
    pub shift_consistent: bool,
}

pub fn valuation_pattern(ctx: &CarryContext, i: u64, g: &GaloisRing) -> Result<ValuationPattern> {
    let ks = block_matrix(ctx, i as i64, BlockKind::KPeisert, g);
    let v = |r: usize, c: usize| -> Result<i64> {
        g.valuation(ks.get(r, c))
            .map(i64::from)
            .ok_or(Error::PrecisionAmbiguity { prime: ctx.p(), precision: g.precision() })
    };
    let (a, b, c, d) = (v(2, 0)?, v(2, 1)?, v(3, 0)?, v(3, 1)?);
    let shifts = [v(0, 2)? - d, v(0, 3)? - b, v(1, 2)? - c, v(1, 3)? - a];
    let r = ctx.r() as i64;
    let s = |j: i64| ctx.digit_sum(j).map(|x| x as i64);
    let num = s(i as i64 + r)? - s(i as i64)? + s(i as i64 + 3 * r)? - s(i as i64 + 2 * r)?;
    Ok(ValuationPattern {
        a,
        b,
        c,
        d,
        shift: shifts[0],
        shift_from_digits: num / (ctx.p() as i64 - 1),
        shift_consistent: shifts.iter().all(|&x| x == shifts[0]) && num % (ctx.p() as i64 - 1) == 0,
    })
}

/// Block conventions, squares, residue ranks, canonical forms and the
/// valuation pattern of `K*_i`, over every class.
pub fn suite_canon(ctx: &CarryContext, g: &GaloisRing) -> Result<SuiteReport> {
    require_p_squared(ctx)?;
    let field = g.field();
    let mut rep = SuiteReport::new("canon", ctx.q(), Some(g.precision()));
    let (kp, ks) = (k_matrix(field, GraphKind::Paley)?, k_matrix(field, GraphKind::Peisert)?);
    let (act_p, act_s) = (Action::new(g, &kp), Action::new(g, &ks));
    let r = ctx.r() as i64;
    let qe = g.from_int(ctx.q() as i64);

    let mut conv = Check::new("block_display");
    let mut square = Check::new("square_is_q");
    let mut eig = Check::new("paley_pair_product");
    let mut canon = Check::new("canonical_form");
    let mut abcd = Check::new("valuation_pattern");
    let reps: Vec<u64> = (1..ctx.r()).collect();
    type Row = (u64, Vec<(BlockKind, Option<GrMatrix>, GrMatrix)>, Result<CanonReport>, Result<ValuationPattern>);
    let rows: Vec<Row> = reps
        .par_iter()
        .map(|&i| {
            let js = |k: BlockKind| -> Vec<i64> {
                match k {
                    BlockKind::KPaley | BlockKind::KPeisert => {
                        vec![i as i64, i as i64 + 2 * r, i as i64 + r, i as i64 + 3 * r]
                    }
                    _ => unreachable!(),
                }
            };
            let mats = [(BlockKind::KPaley, &act_p), (BlockKind::KPeisert, &act_s)]
                .into_iter()
                .map(|(k, act)| {
                    let basis = block_basis(ctx, i as i64, k, g);
                    let idx = js(k);
                    let direct = direct_k_matrix(g, act, &basis, |w| coords_in_e(g, w, &idx));
                    (k, direct, block_matrix(ctx, i as i64, k, g))
                })
                .collect();
            (i, mats, canonical_profile(ctx, i, g), valuation_pattern(ctx, i, g))
        })
        .collect();
    for (i, mats, cr, vp) in rows {
        for (k, direct, display) in &mats {
            conv.record(direct.as_ref() == Some(display), || {
                json!({"i": i, "block": k, "direct": direct.as_ref().map(matrix_json), "display": matrix_json(display)})
            });
            let sq = g.matrix_mul(display, display);
            let ok = (0..4).all(|a| (0..4).all(|b| *sq.get(a, b) == if a == b { qe.clone() } else { g.zero() }));
            square.record(ok, || json!({"i": i, "block": k, "square": matrix_json(&sq)}));
        }
        for j in [i as i64, i as i64 + r, i as i64 + 2 * r, i as i64 + 3 * r] {
            let prod = g.mul(&g.jacobi(j, 2 * r), &g.jacobi(j + 2 * r, 2 * r));
            eig.record(prod == qe, || json!({"i": j, "product": elem_json(&prod)}));
        }
        let cr = cr?;
        canon.record(cr.consistent, || serde_json::to_value(&cr).unwrap());
        let vp = vp?;
        let in_range = [vp.a, vp.b, vp.c, vp.d]
            .iter()
            .all(|&x| (0..=2).contains(&x) && (0..=2).contains(&(x + vp.shift)));
        let ok = vp.shift_consistent
            && vp.shift == vp.shift_from_digits
            && vp.a + vp.d == vp.b + vp.c
            && vp.a + vp.d + vp.shift == 2
            && (-1..=1).contains(&vp.shift)
            && in_range;
        abcd.record(ok, || json!({"i": i, "pattern": vp}));
    }
    // Fixed summand conventions.
    for (k, act) in [(BlockKind::M0Paley, &act_p), (BlockKind::M0Peisert, &act_s)] {
        let basis = block_basis(ctx, 0, k, g);
        let perm: Vec<usize> = if k == BlockKind::M0Paley { vec![0, 1, 3, 2, 4] } else { vec![0, 1, 2, 3, 4] };
        let direct = direct_k_matrix(g, act, &basis, |w| {
            coords_in_m0(g, w, r).map(|c| perm.iter().map(|&x| c[x].clone()).collect())
        });
        let display = block_matrix(ctx, 0, k, g);
        conv.record(direct.as_ref() == Some(&display), || {
            json!({"block": k, "direct": direct.as_ref().map(matrix_json), "display": matrix_json(&display)})
        });
    }
    rep.checks.extend([conv, square, eig, canon, abcd]);
    Ok(rep)
}

/// In the basis `1, [0], v_3, e_{2r}, v_5` with `v_3 = abar e_r + alpha e_{3r}`
/// and `v_5 = alpha e_r + abar e_{3r}`, the Peisert `K*` acts on `M_0` by the
/// Paley display `K_0`.
pub fn verify_m0_basis_change(ctx: &CarryContext, g: &GaloisRing) -> Result<SuiteReport> {
    require_p_squared(ctx)?;
    let mut rep = SuiteReport::new("m0", ctx.q(), Some(g.precision()));
    let (al, ab, eta, half) = (g.alpha(), g.alpha_bar(), g.eta(), g.half());
    let mut scalars = Check::new("scalar_identities");
    let ids = [
        ("alpha^2 = -eta/2", g.mul(&al, &al), g.neg(&g.mul(&eta, &half))),
        ("abar^2 = eta/2", g.mul(&ab, &ab), g.mul(&eta, &half)),
        ("alpha abar = 1/2", g.mul(&al, &ab), half.clone()),
    ];
    for (name, l, rr) in &ids {
        scalars.record(l == rr, || json!({"identity": name, "lhs": elem_json(l), "rhs": elem_json(rr)}));
    }

    let r = ctx.r() as i64;
    let e = |j: i64| g.basis_vector_e(j);
    let v3 = g.vec_axpy(&g.vec_scale(&ab, &e(r)), &al, &e(3 * r));
    let v5 = g.vec_axpy(&g.vec_scale(&al, &e(r)), &ab, &e(3 * r));
    let basis = [g.all_ones(), g.point_vector(0), v3, e(2 * r), v5];
    let ks = k_matrix(g.field(), GraphKind::Peisert)?;
    let act = Action::new(g, &ks);
    let eta_inv = g.inverse(&eta).expect("eta is a unit");
    let to_v = |w: &GrVector| -> Option<Vec<GrElem>> {
        let c = coords_in_m0(g, w, r)?;
        // c_r = abar x + alpha z, c_3r = alpha x + abar z; determinant eta.
        let x = g.mul(&g.sub(&g.mul(&ab, &c[2]), &g.mul(&al, &c[4])), &eta_inv);
        let z = g.mul(&g.sub(&g.mul(&ab, &c[4]), &g.mul(&al, &c[2])), &eta_inv);
        Some(vec![c[0].clone(), c[1].clone(), x, c[3].clone(), z])
    };
    let direct = direct_k_matrix(g, &act, &basis, to_v);
    let target = block_matrix(ctx, 0, BlockKind::M0Paley, g);
    let mut sim = Check::new("new_basis_gives_paley_block");
    sim.record(direct.as_ref() == Some(&target), || {
        json!({"direct": direct.as_ref().map(matrix_json), "paley_block": matrix_json(&target)})
    });
    rep.checks.extend([scalars, sim]);
    Ok(rep)
}

/// Run one suite at `q = p^{2t}`.
pub fn run_suite(suite: Suite, p: u64, t: u32, precision: Option<u32>) -> Result<SuiteReport> {
    let ctx = CarryContext::from_t(p, t)?;
    if suite.needs_p_squared() {
        require_p_squared(&ctx)?;
    }
    let ring = || ring_for(p, t, precision);
    match suite {
        Suite::Carries => Ok(suite_carries(&ctx)),
        Suite::Stickelberger => Ok(suite_stickelberger(&ctx, &ring()?)),
        Suite::Action => suite_action(&ctx, &ring()?),
        Suite::Blocks => {
            let g = if ctx.q() <= LOCAL_BLOCK_LIMIT { Some(ring()?) } else { None };
            suite_blocks(&ctx, g.as_ref())
        }
        Suite::Berndt => verify_berndt(&ctx, &ring()?),
        Suite::Canon => suite_canon(&ctx, &ring()?),
        Suite::M0 => verify_m0_basis_change(&ctx, &ring()?),
    }
}

/// Sample triples `(a, b, c)` for `aA + bI + cJ`: `a` in `1..=3`, `b, c` in `-2..=2`.
pub fn default_grid() -> Vec<(i64, i64, i64)> {
    let mut v = Vec::with_capacity(75);
    for a in 1..=3 {
        for b in -2..=2 {
            for c in -2..=2 {
                v.push((a, b, c));
            }
        }
    }
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleOutcome {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub equal: bool,
    pub paley: GroupSummary,
    pub peisert: GroupSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSummary {
    pub invariant_factors: Vec<String>,
    pub free_rank: u64,
}

impl From<&AbelianGroup> for GroupSummary {
    fn from(g: &AbelianGroup) -> Self {
        GroupSummary { invariant_factors: g.invariant_factors.iter().map(big_to_string).collect(), free_rank: g.free_rank }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneralizedReport {
    pub q: u64,
    pub srg_paley: Option<SrgParams>,
    pub srg_peisert: Option<SrgParams>,
    /// Both connected, regular and satisfying the same quadratic relation,
    /// which fixes the spectrum of every `aA + bI + cJ`.
    pub cospectral: bool,
    pub samples: Vec<SampleOutcome>,
    pub laplacian: SampleOutcome,
}

impl GeneralizedReport {
    pub fn passed(&self) -> bool {
        self.cospectral && self.laplacian.equal && self.samples.iter().all(|s| s.equal)
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serialises");
        v["passed"] = json!(self.passed());
        v
    }
}

/// Smith forms of `aA + bI + cJ` for the Paley and Peisert graphs on the same
/// field, plus their Laplacians.
pub fn compare_generalized(field: &FieldTable, samples: &[(i64, i64, i64)]) -> Result<GeneralizedReport> {
    let a = adjacency(field, GraphKind::Paley)?;
    let s = adjacency(field, GraphKind::Peisert)?;
    let (srg_a, srg_s) = (srg_check(&a).ok(), srg_check(&s).ok());
    let cospectral = srg_a.is_some() && srg_a == srg_s && is_connected(&a) && is_connected(&s);
    let outcome = |x: &IntMatrix, y: &IntMatrix, (ca, cb, cc): (i64, i64, i64)| -> SampleOutcome {
        let (gx, gy) = rayon::join(|| smith_normal_form(x).cokernel, || smith_normal_form(y).cokernel);
        SampleOutcome { a: ca, b: cb, c: cc, equal: gx == gy, paley: (&gx).into(), peisert: (&gy).into() }
    };
    let out: Vec<SampleOutcome> = samples
        .par_iter()
        .map(|&(ca, cb, cc)| -> Result<SampleOutcome> {
            Ok(outcome(&generalized(&a, ca, cb, cc)?, &generalized(&s, ca, cb, cc)?, (ca, cb, cc)))
        })
        .collect::<Result<_>>()?;
    let k = (field.q() as i64 - 1) / 2;
    let lap = outcome(&laplacian(&a)?, &laplacian(&s)?, (-1, k, 0));
    Ok(GeneralizedReport { q: field.q(), srg_paley: srg_a, srg_peisert: srg_s, cospectral, samples: out, laplacian: lap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, t: u32) -> CarryContext {
        CarryContext::from_t(p, t).unwrap()
    }

    #[test]
    fn carries_suite_and_counterexample() {
        for (p, t) in [(3, 1), (7, 1), (3, 2)] {
            let rep = suite_carries(&ctx(p, t));
            assert!(rep.passed(), "{:?}", rep.first_failure());
        }
        let bad = conjugation_with_r_counterexamples(&ctx(7, 1));
        assert!(bad.contains(&(2, 1, 2)));
    }

    #[test]
    fn action_suite_q9_q49() {
        for (p, t) in [(3, 1), (7, 1)] {
            let rep = run_suite(Suite::Action, p, t, None).unwrap();
            assert!(rep.passed(), "{}", rep.to_json());
        }
    }

    #[test]
    fn p_squared_suites_q49() {
        for s in [Suite::Berndt, Suite::Canon, Suite::M0] {
            let rep = run_suite(s, 7, 1, None).unwrap();
            assert!(rep.passed(), "{}", rep.to_json());
        }
        assert!(run_suite(Suite::Canon, 3, 2, None).is_err());
    }

    #[test]
    fn canonical_ranks_q49() {
        let c = ctx(7, 1);
        let g = ring_for(7, 1, None).unwrap();
        let ranks: Vec<usize> = (1..c.r()).map(|i| canonical_profile(&c, i, &g).unwrap().rank_paley).collect();
        assert!(ranks.iter().all(|&r| r <= 2));
        assert!(ranks.contains(&0) || ranks.contains(&1) || ranks.contains(&2));
    }

    #[test]
    fn block_conventions_hold_beyond_p_squared() {
        // The K displays do not depend on q = p^2.
        let c = ctx(3, 2);
        let g = ring_for(3, 2, None).unwrap();
        let kp = k_matrix(g.field(), GraphKind::Paley).unwrap();
        let act = Action::new(&g, &kp);
        let r = c.r() as i64;
        for i in 1..c.r() as i64 {
            let basis = block_basis(&c, i, BlockKind::KPaley, &g);
            let idx = [i, i + 2 * r, i + r, i + 3 * r];
            let d = direct_k_matrix(&g, &act, &basis, |w| coords_in_e(&g, w, &idx));
            assert_eq!(d, Some(block_matrix(&c, i, BlockKind::KPaley, &g)));
        }
    }

    #[test]
    fn generalized_q9() {
        let f = FieldTable::new(3, 2).unwrap();
        let rep = compare_generalized(&f, &[(1, 0, 0), (2, 1, 0), (1, -1, 1)]).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.srg_paley, Some(SrgParams { n: 9, k: 4, lambda: 1, mu: 2 }));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
