//! Integer matrices of Peisert and Paley graphs.
//!
//! Vertices are field elements in encoding order `0..q`, and `u ~ v` iff
//! `v - u` lies in the connection set.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::is_perfect_square;
use crate::error::{Error, Result};
use crate::ffield::{FieldTable, GraphKind};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::MalformedMatrix("dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::MalformedMatrix(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        let data = (0..rows * cols).map(|k| BigInt::from(f(k / cols, k % cols))).collect();
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| (i == j) as i64)
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        Self::from_fn(entries.len(), entries.len(), |i, j| if i == j { entries[i] } else { 0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    /// All entries as `i64`, if they fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.data.iter().map(|x| x.to_i64()).collect()
    }

    /// Entries reduced into `[0, modulus)`, for `modulus < 2^63`.
    pub fn entries_mod(&self, modulus: u64) -> Vec<u64> {
        let big = BigInt::from(modulus);
        self.data
            .iter()
            .map(|x| match x.to_i64() {
                Some(v) => v.rem_euclid(modulus as i64) as u64,
                None => num_integer::Integer::mod_floor(x, &big).to_u64().unwrap(),
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn row_sums(&self) -> Vec<BigInt> {
        self.data.chunks(self.cols).map(|row| row.iter().sum()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::MalformedMatrix("dimension mismatch in product".into()));
        }
        let mut data = vec![BigInt::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        IntMatrix::new(self.rows, other.cols, data)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: i64, other: &IntMatrix, b: i64) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::MalformedMatrix("dimension mismatch in sum".into()));
        }
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let data = self.data.iter().zip(&other.data).map(|(x, y)| &a * x + &b * y).collect();
        IntMatrix::new(self.rows, self.cols, data)
    }
}

/// Adjacency matrix of the Cayley graph on the field with the given
/// connection set.
pub fn adjacency(field: &FieldTable, kind: GraphKind) -> Result<IntMatrix> {
    let set = field.connection_set(kind)?;
    let q = field.q() as usize;
    let mut member = vec![false; q];
    for &s in &set {
        member[s as usize] = true;
    }
    Ok(IntMatrix::from_fn(q, q, |u, v| {
        member[field.sub(v as u32, u as u32) as usize] as i64
    }))
}

fn check_simple_graph(a: &IntMatrix) -> Result<()> {
    if !a.is_symmetric() {
        return Err(Error::MalformedMatrix("adjacency matrix is not symmetric".into()));
    }
    for i in 0..a.rows() {
        if !a.get(i, i).is_zero() {
            return Err(Error::MalformedMatrix(format!("nonzero diagonal entry at {i}")));
        }
        for j in 0..a.cols() {
            let x = a.get(i, j);
            if !x.is_zero() && !x.is_one() {
                return Err(Error::MalformedMatrix(format!("entry ({i}, {j}) is not 0 or 1")));
            }
        }
    }
    Ok(())
}

/// `L = D - A`.
pub fn laplacian(a: &IntMatrix) -> Result<IntMatrix> {
    check_simple_graph(a)?;
    let deg = a.row_sums();
    let n = a.rows();
    let data = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                deg[i].clone()
            } else {
                -a.get(i, j)
            }
        })
        .collect();
    IntMatrix::new(n, n, data)
}

/// `aA + bI + cJ`.
pub fn generalized(a_mat: &IntMatrix, a: i64, b: i64, c: i64) -> Result<IntMatrix> {
    if !a_mat.is_square() {
        return Err(Error::MalformedMatrix("generalized adjacency needs a square matrix".into()));
    }
    let n = a_mat.rows();
    let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
    let data = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let mut x = &a * a_mat.get(i, j) + &c;
            if i == j {
                x += &b;
            }
            x
        })
        .collect();
    IntMatrix::new(n, n, data)
}

pub fn is_connected(a: &IntMatrix) -> bool {
    let n = a.rows();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if !seen[v] && !a.get(u, v).is_zero() {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub n: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
}

/// Why a graph failed the strongly-regular test, with whatever parameters
/// could still be read off.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SrgFailure {
    pub reason: String,
    pub k: Option<u64>,
    pub lambda: Option<u64>,
    pub mu: Option<u64>,
}

impl SrgParams {
    /// Adjacency eigenvalues with multiplicities, when they are integers.
    /// Requires a connected graph that is neither complete nor empty.
    pub fn spectrum(&self) -> Option<Vec<(i64, u64)>> {
        let (n, k, l, m) = (self.n as i64, self.k as i64, self.lambda as i64, self.mu as i64);
        let disc = (l - m) * (l - m) + 4 * (k - m);
        let s = is_perfect_square(u64::try_from(disc).ok()?)? as i64;
        let (th1, th2) = ((l - m + s) / 2, (l - m - s) / 2);
        if (l - m + s) % 2 != 0 || s == 0 {
            return None;
        }
        // f + g = n - 1 and k + f th1 + g th2 = 0.
        let g_num = k + (n - 1) * th1;
        if g_num % s != 0 {
            return None;
        }
        let g = g_num / s;
        let f = n - 1 - g;
        Some(vec![(k, 1), (th1, f as u64), (th2, g as u64)])
    }
}

/// Read off `(k, lambda, mu)` and confirm `A^2 + (mu - lambda)A + (mu - k)I = mu J`
/// exactly.
pub fn srg_check(a: &IntMatrix) -> std::result::Result<SrgParams, SrgFailure> {
    let fail = |reason: &str, k, lambda, mu| SrgFailure { reason: reason.to_string(), k, lambda, mu };
    if check_simple_graph(a).is_err() {
        return Err(fail("not a simple graph", None, None, None));
    }
    let n = a.rows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| a.get(i, j).is_one()).collect())
        .collect();
    let k = adj[0].len();
    if adj.iter().any(|r| r.len() != k) {
        return Err(fail("not regular", None, None, None));
    }
    let mut bits = vec![vec![false; n]; n];
    for (i, r) in adj.iter().enumerate() {
        for &j in r {
            bits[i][j] = true;
        }
    }
    let (mut lambda, mut mu): (Option<usize>, Option<usize>) = (None, None);
    for i in 0..n {
        for j in i + 1..n {
            let common = adj[i].iter().filter(|&&x| bits[j][x]).count();
            let slot = if bits[i][j] { &mut lambda } else { &mut mu };
            match *slot {
                None => *slot = Some(common),
                Some(v) if v != common => {
                    let which = if bits[i][j] { "adjacent" } else { "non-adjacent" };
                    return Err(fail(
                        &format!("{which} pairs disagree on common neighbours"),
                        Some(k as u64),
                        lambda.map(|x| x as u64),
                        mu.map(|x| x as u64),
                    ));
                }
                _ => {}
            }
        }
    }
    let k = k as u64;
    match (lambda, mu) {
        (Some(l), Some(m)) => Ok(SrgParams { n: n as u64, k, lambda: l as u64, mu: m as u64 }),
        (l, None) => Err(fail("no non-adjacent pairs, mu undefined", Some(k), l.map(|x| x as u64), None)),
        (None, m) => Err(fail("no adjacent pairs, lambda undefined", Some(k), None, m.map(|x| x as u64))),
    }
}

/// Adjacency spectrum `{(q-1)/2: 1, (-1+sqrt q)/2: (q-1)/2, (-1-sqrt q)/2: (q-1)/2}`.
pub fn spectrum_closed_form(q: u64) -> Result<Vec<(i64, u64)>> {
    let s = is_perfect_square(q)
        .ok_or_else(|| Error::InvalidParameter(format!("q = {q} is not a perfect square")))?;
    if q % 4 != 1 {
        return Err(Error::InvalidParameter(format!("q = {q} is not 1 mod 4")));
    }
    let (q, s) = (q as i64, s as i64);
    let half = ((q - 1) / 2) as u64;
    Ok(vec![((q - 1) / 2, 1), ((s - 1) / 2, half), ((-1 - s) / 2, half)])
}

/// Write a symmetric matrix in Matrix Market coordinate format, lower
/// triangle only, 1-based indices.
pub fn write_matrix_market<W: Write>(m: &IntMatrix, comment: &str, mut out: W) -> Result<()> {
    if !m.is_symmetric() {
        return Err(Error::MalformedMatrix("only symmetric matrices are exported".into()));
    }
    let mut body = String::new();
    let mut nnz = 0usize;
    for j in 0..m.cols() {
        for i in j..m.rows() {
            let x = m.get(i, j);
            if !x.is_zero() {
                nnz += 1;
                writeln!(body, "{} {} {}", i + 1, j + 1, x).unwrap();
            }
        }
    }
    writeln!(out, "%%MatrixMarket matrix coordinate integer symmetric")?;
    for line in comment.lines() {
        writeln!(out, "% {line}")?;
    }
    writeln!(out, "{} {} {}", m.rows(), m.cols(), nnz)?;
    out.write_all(body.as_bytes())?;
    Ok(())
}

/// Read a Matrix Market coordinate integer matrix (`general` or `symmetric`).
pub fn read_matrix_market<R: BufRead>(input: R) -> Result<IntMatrix> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market input".into()))??;
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(Error::Parse(format!("unsupported header: {header}")));
    }
    if fields[3] != "integer" {
        return Err(Error::Parse(format!("unsupported field type: {}", fields[3])));
    }
    let symmetric = match fields[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(Error::Parse(format!("unsupported symmetry: {other}"))),
    };
    let mut data_lines = lines.filter(|l| match l {
        Ok(s) => !s.starts_with('%') && !s.trim().is_empty(),
        Err(_) => true,
    });
    let size = data_lines
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad size line: {size}"))))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(Error::Parse(format!("bad size line: {size}")));
    };
    if rows == 0 || cols == 0 {
        return Err(Error::Parse("dimensions must be positive".into()));
    }
    let mut data = vec![BigInt::zero(); rows * cols];
    let mut count = 0;
    for line in data_lines {
        let line = line?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [i, j, v] = parts[..] else {
            return Err(Error::Parse(format!("bad entry line: {line}")));
        };
        let parse_idx = |s: &str, bound: usize| -> Result<usize> {
            let x: usize = s.parse().map_err(|_| Error::Parse(format!("bad index: {s}")))?;
            if x == 0 || x > bound {
                return Err(Error::Parse(format!("index {x} out of range")));
            }
            Ok(x - 1)
        };
        let (i, j) = (parse_idx(i, rows)?, parse_idx(j, cols)?);
        let v: BigInt = v.parse().map_err(|_| Error::Parse(format!("bad value: {v}")))?;
        if symmetric {
            data[j * cols + i] = v.clone();
        }
        data[i * cols + j] = v;
        count += 1;
    }
    if count != nnz {
        return Err(Error::Parse(format!("expected {nnz} entries, found {count}")));
    }
    IntMatrix::new(rows, cols, data)
}

/// Number of spanning trees from an integral Laplacian spectrum:
/// product of the nonzero eigenvalues divided by the vertex count.
pub fn spanning_trees_from_spectrum(n: u64, laplacian_spectrum: &[(i64, u64)]) -> Option<BigInt> {
    let mut prod = BigInt::one();
    let mut zeros = 0;
    for &(ev, mult) in laplacian_spectrum {
        if ev == 0 {
            zeros += mult;
        } else {
            prod *= BigInt::from(ev).pow(mult as u32);
        }
    }
    if zeros != 1 || prod.is_negative() {
        return None;
    }
    let n = BigInt::from(n);
    (&prod % &n).is_zero().then(|| prod / n)
}
