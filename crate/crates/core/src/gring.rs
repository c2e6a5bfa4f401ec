//! Exact arithmetic in the Galois ring `GR(p^k, n) = (Z/p^k)[x]/(f)`.
//!
//! `f` is the Hensel lift of the field modulus that divides `x^q - x`, so the
//! class of `x` is itself a Teichmüller representative. Since `p` is
//! unramified in the cyclotomic ring generated by the `(q-1)`-st roots of
//! unity, this ring is isomorphic to that ring's completion at a prime over
//! `p`, reduced modulo `p^k`. All Jacobi-sum identities and valuations below
//! are evaluated here.
//!
//! The Teichmüller character `T` sends `beta^j` to `omega^j`, where `omega` is
//! the Teichmüller lift of the primitive element `beta`.

use std::sync::Arc;

use crate::arith::{checked_pow, inv_mod, valuation_u64};
use crate::error::{Error, Result};
use crate::ffield::FieldTable;

/// An element of `GR(p^k, n)`: `n` coefficients in `[0, p^k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrElem(Vec<u64>);

impl GrElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub struct GaloisRing {
    field: Arc<FieldTable>,
    k: u32,
    pk: u64,
    modulus_lift: Vec<u64>,
    /// `omega^j` for `j` in `0..q-1`, flattened `n` coefficients per entry.
    teich: Vec<u64>,
}

/// A vector of the free module on the field elements, coordinates indexed by
/// field-element encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrVector {
    pub coords: Vec<GrElem>,
}

/// A dense matrix over the ring, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<GrElem>,
}

impl GrMatrix {
    pub fn get(&self, i: usize, j: usize) -> &GrElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GrElem) {
        self.entries[i * self.cols + j] = v;
    }
}

/// Exponents of the elementary divisors readable at the ring precision, and
/// the number of remaining ones (exponent at least `k`, or zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrDivisors {
    pub exponents: Vec<u32>,
    pub residual: usize,
}

/// A Gaussian integer `re + im * i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };

    /// `i^e`.
    pub fn unit(e: u64) -> GaussInt {
        match e % 4 {
            0 => GaussInt { re: 1, im: 0 },
            1 => GaussInt { re: 0, im: 1 },
            2 => GaussInt { re: -1, im: 0 },
            _ => GaussInt { re: 0, im: -1 },
        }
    }

    pub fn conj(self) -> GaussInt {
        GaussInt { re: self.re, im: -self.im }
    }

    pub fn norm(self) -> i64 {
        self.re * self.re + self.im * self.im
    }
}

impl std::ops::Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt { re: self.re + o.re, im: self.im + o.im }
    }
}

impl std::ops::Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl std::fmt::Display for GaussInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im == 0 {
            write!(f, "{}", self.re)
        } else if self.im < 0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Multiply two coefficient vectors modulo `pk` and the monic `modulus`.
fn mul_raw(a: &[u64], b: &[u64], modulus: &[u64], pk: u64) -> Vec<u64> {
    let n = modulus.len() - 1;
    let m = pk as u128;
    let mut prod = vec![0u128; 2 * n - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u128 * y as u128) % m;
        }
    }
    for d in (n..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        for j in 0..n {
            let sub = c * modulus[j] as u128 % m;
            prod[d - n + j] = (prod[d - n + j] + m - sub) % m;
        }
    }
    prod[..n].iter().map(|&c| c as u64).collect()
}

/// Iterate `z <- z^q` until it stops changing; converges to the Teichmüller
/// representative of `z mod p` within `k` steps.
fn teichmuller_raw(z: Vec<u64>, q: u64, modulus: &[u64], pk: u64, k: u32) -> Vec<u64> {
    let mut z = z;
    for _ in 0..=k + 1 {
        let next = pow_raw(&z, q, modulus, pk);
        if next == z {
            return z;
        }
        z = next;
    }
    unreachable!("Frobenius iteration converges within k steps")
}

impl GaloisRing {
    /// Build `GR(p^k, n)` over the given field.
    pub fn new(field: Arc<FieldTable>, k: u32) -> Result<Self> {
        let p = field.p();
        let n = field.n() as usize;
        let q = field.q();
        if k == 0 {
            return Err(Error::InvalidParameter("precision must be at least 1".into()));
        }
        if p == 2 {
            return Err(Error::InvalidParameter("the Galois ring needs an odd prime".into()));
        }
        let pk = checked_pow(p, k)
            .filter(|&m| m < (1u64 << 62))
            .ok_or_else(|| Error::InvalidParameter(format!("{p}^{k} exceeds the word size")))?;

        // Work first modulo the naive lift of the field modulus; the class of x
        // there lifts a root, and the product over its Frobenius conjugates is
        // the lift dividing x^q - x.
        let naive: Vec<u64> = field.modulus().to_vec();
        let x_naive = {
            let mut v = vec![0u64; n + 1];
            v[1] = 1;
            reduce_poly(v, &naive, pk)
        };
        let root = teichmuller_raw(x_naive, q, &naive, pk, k);
        let mut lifted: Vec<Vec<u64>> = vec![one_raw(n, pk)];
        let mut conj = root;
        for _ in 0..n {
            // lifted *= (Y - conj)
            let mut next = vec![vec![0u64; n]; lifted.len() + 1];
            for (d, c) in lifted.iter().enumerate() {
                add_assign_raw(&mut next[d + 1], c, pk);
                let prod = mul_raw(c, &conj, &naive, pk);
                sub_assign_raw(&mut next[d], &prod, pk);
            }
            lifted = next;
            conj = pow_raw(&conj, p, &naive, pk);
        }
        let modulus_lift: Vec<u64> = lifted
            .iter()
            .map(|c| {
                debug_assert!(c[1..].iter().all(|&v| v == 0));
                c[0]
            })
            .collect();
        debug_assert!(modulus_lift
            .iter()
            .zip(&naive)
            .all(|(a, b)| a % p == b % p));

        let beta = {
            let mut v = field.digits(field.beta());
            v.resize(n, 0);
            v
        };
        let omega = teichmuller_raw(beta, q, &modulus_lift, pk, k);
        let count = (q - 1) as usize;
        let mut teich = Vec::with_capacity(count * n);
        let mut cur = one_raw(n, pk);
        for _ in 0..count {
            teich.extend_from_slice(&cur);
            cur = mul_raw(&cur, &omega, &modulus_lift, pk);
        }
        debug_assert_eq!(cur, one_raw(n, pk));

        Ok(GaloisRing { field, k, pk, modulus_lift, teich })
    }

    /// Ring at the default precision `2t + 2` where `q = p^{2t}`
    /// (for odd extension degree, `n + 2`).
    pub fn with_default_precision(field: Arc<FieldTable>) -> Result<Self> {
        let k = field.n() + 2;
        Self::new(field, k)
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    /// The coefficient modulus `p^k`.
    pub fn char_modulus(&self) -> u64 {
        self.pk
    }

    pub fn modulus_lift(&self) -> &[u64] {
        &self.modulus_lift
    }

    fn n(&self) -> usize {
        self.field.n() as usize
    }

    pub fn zero(&self) -> GrElem {
        GrElem(vec![0; self.n()])
    }

    pub fn one(&self) -> GrElem {
        GrElem(one_raw(self.n(), self.pk))
    }

    pub fn from_int(&self, v: i64) -> GrElem {
        let mut c = vec![0; self.n()];
        c[0] = v.rem_euclid(self.pk as i64) as u64;
        GrElem(c)
    }

    /// Lift of a field element through its coefficient digits.
    pub fn lift(&self, x: u32) -> GrElem {
        let mut c = self.field.digits(x);
        c.resize(self.n(), 0);
        GrElem(c)
    }

    /// Teichmüller lift `omega^j`, exponent taken modulo `q - 1`.
    pub fn teich(&self, j: i64) -> GrElem {
        let n = self.n();
        let idx = j.rem_euclid((self.field.q() - 1) as i64) as usize;
        GrElem(self.teich[idx * n..(idx + 1) * n].to_vec())
    }

    /// `eta = omega^r`, a primitive fourth root of unity.
    pub fn eta(&self) -> GrElem {
        self.teich(((self.field.q() - 1) / 4) as i64)
    }

    pub fn half(&self) -> GrElem {
        self.from_int(inv_mod(2, self.pk).expect("p is odd") as i64)
    }

    /// `alpha = (1 - eta) / 2`.
    pub fn alpha(&self) -> GrElem {
        self.mul(&self.sub(&self.one(), &self.eta()), &self.half())
    }

    /// `alpha_bar = (1 + eta) / 2`.
    pub fn alpha_bar(&self) -> GrElem {
        self.mul(&self.add(&self.one(), &self.eta()), &self.half())
    }

    pub fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let mut out = a.0.clone();
        add_assign_raw(&mut out, &b.0, self.pk);
        GrElem(out)
    }

    pub fn sub(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let mut out = a.0.clone();
        sub_assign_raw(&mut out, &b.0, self.pk);
        GrElem(out)
    }

    pub fn neg(&self, a: &GrElem) -> GrElem {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        GrElem(mul_raw(&a.0, &b.0, &self.modulus_lift, self.pk))
    }

    pub fn scale(&self, a: &GrElem, s: i64) -> GrElem {
        let s = s.rem_euclid(self.pk as i64) as u64;
        GrElem(a.0.iter().map(|&c| crate::arith::mul_mod(c, s, self.pk)).collect())
    }

    pub fn pow(&self, a: &GrElem, e: u64) -> GrElem {
        GrElem(pow_raw(&a.0, e, &self.modulus_lift, self.pk))
    }

    pub fn is_zero(&self, a: &GrElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    /// The p-adic valuation, or `None` when the element is `0 mod p^k`
    /// (valuation at least `k`).
    pub fn valuation(&self, a: &GrElem) -> Option<u32> {
        let p = self.field.p();
        a.0.iter().filter(|&&c| c != 0).map(|&c| valuation_u64(c, p)).min()
    }

    /// Reduction modulo `p`, as a field-element encoding.
    pub fn reduce(&self, a: &GrElem) -> u32 {
        let p = self.field.p();
        let digits: Vec<u64> = a.0.iter().map(|c| c % p).collect();
        self.field.encode(&digits)
    }

    /// Inverse of a unit; `None` if `a` is divisible by `p`.
    pub fn inverse(&self, a: &GrElem) -> Option<GrElem> {
        let red = self.reduce(a);
        if red == 0 {
            return None;
        }
        let mut y = self.lift(self.field.inv(red).ok()?);
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.k {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
            prec *= 2;
        }
        debug_assert_eq!(self.mul(a, &y), self.one());
        Some(y)
    }

    /// Exact division by `p^v`; coefficients must all be divisible by `p^v`.
    /// The result is determined modulo `p^{k-v}`.
    pub fn div_p_power(&self, a: &GrElem, v: u32) -> GrElem {
        let pv = self.field.p().pow(v);
        GrElem(a.0.iter().map(|&c| {
            debug_assert_eq!(c % pv, 0);
            c / pv
        }).collect())
    }

    pub fn matrix_zero(&self, rows: usize, cols: usize) -> GrMatrix {
        GrMatrix { rows, cols, entries: vec![self.zero(); rows * cols] }
    }

    pub fn matrix_mul(&self, a: &GrMatrix, b: &GrMatrix) -> GrMatrix {
        assert_eq!(a.cols, b.rows, "dimension mismatch");
        let mut out = self.matrix_zero(a.rows, b.cols);
        for i in 0..a.rows {
            for j in 0..b.cols {
                let mut acc = self.zero();
                for k in 0..a.cols {
                    acc = self.add(&acc, &self.mul(a.get(i, k), b.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Elementary divisors by elimination with a pivot of least valuation;
    /// exponents are returned in increasing order.
    pub fn elementary_divisors(&self, m: &GrMatrix) -> GrDivisors {
        let (rows, cols) = (m.rows, m.cols);
        let mut a = m.entries.clone();
        let mut exponents = Vec::new();
        for t in 0..rows.min(cols) {
            let mut best: Option<(usize, usize, u32)> = None;
            for i in t..rows {
                for j in t..cols {
                    if let Some(v) = self.valuation(&a[i * cols + j]) {
                        if best.map_or(true, |b| v < b.2) {
                            best = Some((i, j, v));
                        }
                    }
                }
            }
            let Some((pi, pj, v)) = best else { break };
            for j in 0..cols {
                a.swap(pi * cols + j, t * cols + j);
            }
            for i in 0..rows {
                a.swap(i * cols + pj, i * cols + t);
            }
            let unit_inv = self
                .inverse(&self.div_p_power(&a[t * cols + t], v))
                .expect("pivot has minimal valuation");
            for i in t + 1..rows {
                if self.is_zero(&a[i * cols + t]) {
                    continue;
                }
                let factor = self.mul(&self.div_p_power(&a[i * cols + t], v), &unit_inv);
                for j in t..cols {
                    let sub = self.mul(&factor, &a[t * cols + j]);
                    a[i * cols + j] = self.sub(&a[i * cols + j], &sub);
                }
            }
            // Column operations clear the rest of row t without touching the
            // remaining block.
            exponents.push(v);
        }
        exponents.sort_unstable();
        let residual = rows.min(cols) - exponents.len();
        GrDivisors { exponents, residual }
    }

    /// Image of the Gaussian integer `re + im * i` under `i -> eta`.
    pub fn from_gaussian(&self, g: GaussInt) -> GrElem {
        self.add(&self.from_int(g.re), &self.scale(&self.eta(), g.im))
    }

    /// The character `T^{-i}` evaluated at a field element, as an exponent of
    /// `omega`; `None` means the value 0. The principal character is 1 at 0.
    #[inline]
    fn char_exponent(&self, i: u64, x: u32) -> Option<u64> {
        let nq = self.field.q() - 1;
        match self.field.log(x) {
            None => (i == 0).then_some(0),
            Some(l) => Some((nq - i) % nq * l as u64 % nq),
        }
    }

    /// `J(T^{-i}, T^{-j}) = sum over x of T^{-i}(x) T^{-j}(1 - x)`, with
    /// principal characters taking the value 1 at 0 and nonprincipal ones 0.
    pub fn jacobi(&self, i: i64, j: i64) -> GrElem {
        let nq = self.field.q() - 1;
        let n = self.n();
        let i = i.rem_euclid(nq as i64) as u64;
        let j = j.rem_euclid(nq as i64) as u64;
        let mut acc = vec![0u64; n];
        for x in 0..self.field.q() as u32 {
            let y = self.field.sub(1, x);
            let (Some(a), Some(b)) = (self.char_exponent(i, x), self.char_exponent(j, y)) else {
                continue;
            };
            let idx = ((a + b) % nq) as usize;
            add_assign_raw(&mut acc, &self.teich[idx * n..(idx + 1) * n], self.pk);
        }
        GrElem(acc)
    }

    /// `e_i`: coordinate `T^{-i}(x)` at each nonzero `x`, and 0 at 0.
    pub fn basis_vector_e(&self, i: i64) -> GrVector {
        let nq = (self.field.q() - 1) as i64;
        let i = i.rem_euclid(nq) as u64;
        let coords = (0..self.field.q() as u32)
            .map(|x| match self.field.log(x) {
                None => self.zero(),
                Some(_) => self.teich(self.char_exponent(i, x).unwrap() as i64),
            })
            .collect();
        GrVector { coords }
    }

    /// The basis vector `[x]` of a single field element.
    pub fn point_vector(&self, x: u32) -> GrVector {
        let mut coords = vec![self.zero(); self.field.q() as usize];
        coords[x as usize] = self.one();
        GrVector { coords }
    }

    /// The all-ones vector `[0] + e_0`.
    pub fn all_ones(&self) -> GrVector {
        GrVector { coords: vec![self.one(); self.field.q() as usize] }
    }

    pub fn vec_zero(&self) -> GrVector {
        GrVector { coords: vec![self.zero(); self.field.q() as usize] }
    }

    /// `a + s * b`, coordinatewise.
    pub fn vec_axpy(&self, a: &GrVector, s: &GrElem, b: &GrVector) -> GrVector {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| self.add(x, &self.mul(s, y)))
            .collect();
        GrVector { coords }
    }

    pub fn vec_scale(&self, s: &GrElem, v: &GrVector) -> GrVector {
        GrVector { coords: v.coords.iter().map(|x| self.mul(s, x)).collect() }
    }
}

fn one_raw(n: usize, pk: u64) -> Vec<u64> {
    let mut v = vec![0u64; n];
    v[0] = 1 % pk;
    v
}

fn add_assign_raw(a: &mut [u64], b: &[u64], pk: u64) {
    for (x, &y) in a.iter_mut().zip(b) {
        let s = *x + y;
        *x = if s >= pk { s - pk } else { s };
    }
}

fn sub_assign_raw(a: &mut [u64], b: &[u64], pk: u64) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x = if *x >= y { *x - y } else { *x + pk - y };
    }
}

fn pow_raw(base: &[u64], mut e: u64, modulus: &[u64], pk: u64) -> Vec<u64> {
    let mut acc = one_raw(modulus.len() - 1, pk);
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_raw(&acc, &b, modulus, pk);
        }
        b = mul_raw(&b, &b, modulus, pk);
        e >>= 1;
    }
    acc
}

/// Reduce a polynomial of any degree modulo `pk` and the monic `modulus`.
fn reduce_poly(mut v: Vec<u64>, modulus: &[u64], pk: u64) -> Vec<u64> {
    let n = modulus.len() - 1;
    for d in (n..v.len()).rev() {
        let c = v[d] % pk;
        v[d] = 0;
        for j in 0..n {
            let sub = crate::arith::mul_mod(c, modulus[j], pk);
            v[d - n + j] = (v[d - n + j] % pk + pk - sub) % pk;
        }
    }
    v.truncate(n);
    v.resize(n, 0);
    v
}

/// `J(T^{-i}, T^{-j})` for `i`, `j` multiples of `r = (q-1)/4`, computed as an
/// exact Gaussian integer under `T(beta)^r -> i`. The characters involved take
/// values in the fourth roots of unity, so only quartic classes are needed.
pub fn jacobi_quartic_exact(field: &FieldTable, i: i64, j: i64) -> Result<GaussInt> {
    let q = field.q();
    if q % 4 != 1 {
        return Err(Error::InvalidParameter(format!("q = {q} is not 1 mod 4")));
    }
    let nq = (q - 1) as i64;
    let r = nq / 4;
    let (i, j) = (i.rem_euclid(nq), j.rem_euclid(nq));
    if i % r != 0 || j % r != 0 {
        return Err(Error::InvalidParameter(format!(
            "Jacobi indices ({i}, {j}) are not multiples of r = {r}"
        )));
    }
    let (a, b) = ((i / r) as u64, (j / r) as u64);
    // T^{-a r}(x) = i^{-a * class(x)}; value at 0 is 1 if principal, else 0.
    let chi = |a: u64, x: u32| -> Option<GaussInt> {
        if x == 0 {
            return (a == 0).then_some(GaussInt::ONE);
        }
        let c = field.quartic_class(x).expect("q = 1 mod 4") as u64;
        Some(GaussInt::unit((4 - a % 4) % 4 * c))
    };
    let mut sum = GaussInt::ZERO;
    for x in 0..q as u32 {
        if let (Some(u), Some(v)) = (chi(a, x), chi(b, field.sub(1, x))) {
            sum = sum + u * v;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::CarryContext;

    fn ring(p: u64, n: u32, k: u32) -> GaloisRing {
        GaloisRing::new(Arc::new(FieldTable::new(p, n).unwrap()), k).unwrap()
    }

    #[test]
    fn gr27_modulus_is_its_own_lift() {
        let g = ring(3, 2, 3);
        assert_eq!(g.modulus_lift(), &[1, 0, 1]);
        assert_eq!(g.char_modulus(), 27);
        // omega^4 = -1
        assert_eq!(g.teich(4), g.from_int(26));
        assert_eq!(g.teich(0), g.one());
    }

    #[test]
    fn teichmuller_invariants() {
        for (p, n, k) in [(3u64, 2u32, 4u32), (7, 2, 4), (3, 4, 6), (5, 3, 3), (11, 2, 4), (7, 1, 5)] {
            let g = ring(p, n, k);
            let f = g.field().clone();
            let q = f.q();
            // modulus_lift divides x^q - x: x^q = x in the ring.
            let mut xv = vec![0u64; n as usize];
            if n > 1 {
                xv[1] = 1;
            } else {
                xv[0] = (g.char_modulus() - g.modulus_lift()[0]) % g.char_modulus();
            }
            let x = GrElem(xv);
            assert_eq!(g.pow(&x, q), x, "p={p} n={n}");
            for j in 0..(q - 1) as i64 {
                let t = g.teich(j);
                assert_eq!(g.reduce(&t), f.exp(j as u64));
                assert_eq!(g.pow(&t, q), t);
            }
            for (a, b) in [(1i64, 2i64), (5, (q - 2) as i64), (3, 3)] {
                assert_eq!(g.mul(&g.teich(a), &g.teich(b)), g.teich(a + b));
            }
        }
    }

    #[test]
    fn jacobi_small_values() {
        let g = ring(3, 2, 3);
        assert_eq!(g.jacobi(2, 2), g.from_int(3));
        assert_eq!(g.jacobi(0, 0), g.from_int(9));
        assert_eq!(g.valuation(&g.jacobi(1, 2)), Some(1));
        assert_eq!(g.valuation(&g.jacobi(1, 6)), Some(0));
    }

    #[test]
    fn valuations() {
        let g = ring(3, 2, 3);
        assert_eq!(g.valuation(&g.from_int(3)), Some(1));
        assert_eq!(g.valuation(&g.from_int(0)), None);
        assert_eq!(g.valuation(&g.from_int(18)), Some(2));
        assert_eq!(g.valuation(&g.one()), Some(0));
    }

    #[test]
    fn stickelberger_small() {
        for (p, t) in [(3u64, 1u32), (7, 1), (3, 2)] {
            let ctx = CarryContext::from_t(p, t).unwrap();
            let g = ring(p, 2 * t, 2 * t + 2);
            let nq = ctx.q() as i64 - 1;
            for i in 1..nq {
                for j in 1..nq {
                    if (i + j) % nq == 0 {
                        continue;
                    }
                    let v = g.valuation(&g.jacobi(i, j));
                    assert_eq!(v, Some(ctx.carry_count(i, j).unwrap()), "q={} i={i} j={j}", ctx.q());
                }
            }
        }
    }

    #[test]
    fn reduction_compatibility() {
        let f = Arc::new(FieldTable::new(7, 2).unwrap());
        let hi = GaloisRing::new(f.clone(), 5).unwrap();
        let lo = GaloisRing::new(f, 2).unwrap();
        for (i, j) in [(1i64, 12i64), (5, 7), (13, 36), (0, 3)] {
            let a = hi.jacobi(i, j);
            let reduced: Vec<u64> = a.coeffs().iter().map(|c| c % 49).collect();
            assert_eq!(reduced, lo.jacobi(i, j).coeffs());
        }
    }

    #[test]
    fn conjugation_symmetry() {
        // Replacing omega by omega^{-1} sends J(i, j) to J(-i, -j). Evaluate the
        // sum with the inverted table by hand.
        let g = ring(7, 2, 4);
        let f = g.field();
        let nq = f.q() - 1;
        for (i, j) in [(1u64, 12u64), (5, 24), (13, 36)] {
            let mut acc = g.zero();
            for x in 0..f.q() as u32 {
                let y = f.sub(1, x);
                let (Some(lx), Some(ly)) = (f.log(x), f.log(y)) else { continue };
                let e = (i * lx as u64 + j * ly as u64) % nq;
                acc = g.add(&acc, &g.teich(e as i64));
            }
            assert_eq!(acc, g.jacobi(-(i as i64), -(j as i64)));
        }
    }

    #[test]
    fn inverse_and_alpha_identities() {
        let g = ring(7, 2, 4);
        let a = g.alpha();
        let ab = g.alpha_bar();
        let eta = g.eta();
        assert_eq!(g.mul(&a, &ab), g.half());
        assert_eq!(g.add(&g.mul(&a, &a), &g.mul(&ab, &ab)), g.zero());
        assert_eq!(g.mul(&ab, &ab), g.mul(&eta, &g.half()));
        assert_eq!(g.mul(&a, &a), g.neg(&g.mul(&eta, &g.half())));
        let u = g.add(&g.teich(5), &g.from_int(7));
        let inv = g.inverse(&u).unwrap();
        assert_eq!(g.mul(&u, &inv), g.one());
        assert!(g.inverse(&g.from_int(14)).is_none());
    }

    #[test]
    fn basis_vectors() {
        let g = ring(3, 2, 3);
        let f = g.field();
        let e0 = g.basis_vector_e(0);
        assert_eq!(e0.coords[0], g.zero());
        assert!(e0.coords[1..].iter().all(|c| *c == g.one()));
        let e3 = g.basis_vector_e(3);
        assert_eq!(e3.coords[f.beta() as usize], g.teich(-3));
        let e4 = g.basis_vector_e(4);
        for x in 1..9u32 {
            assert_eq!(e4.coords[x as usize], e4.coords[f.neg(x) as usize]);
        }
    }

    #[test]
    fn quartic_exact_values() {
        let f9 = FieldTable::new(3, 2).unwrap();
        assert_eq!(jacobi_quartic_exact(&f9, 2, 2).unwrap(), GaussInt { re: 3, im: 0 });
        let j = jacobi_quartic_exact(&f9, 2, 4).unwrap();
        assert_eq!(j.norm(), 9);
        let f49 = FieldTable::new(7, 2).unwrap();
        assert_eq!(jacobi_quartic_exact(&f49, 12, 12).unwrap(), GaussInt { re: 7, im: 0 });
        assert!(jacobi_quartic_exact(&f49, 5, 12).is_err());
        assert_eq!(jacobi_quartic_exact(&f49, 0, 0).unwrap(), GaussInt { re: 49, im: 0 });
        // Gaussian route agrees with the Galois ring route.
        let g = GaloisRing::new(Arc::new(f49.clone()), 4).unwrap();
        for a in 0..4i64 {
            for b in 0..4i64 {
                let exact = jacobi_quartic_exact(&f49, 12 * a, 12 * b).unwrap();
                assert_eq!(g.from_gaussian(exact), g.jacobi(12 * a, 12 * b), "a={a} b={b}");
            }
        }
    }
}
