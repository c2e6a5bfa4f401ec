//! Deterministic construction of GF(p^n) with discrete-log tables.
//!
//! An element `a_0 + a_1 x + ... + a_{n-1} x^{n-1}` (with `x` the class of the
//! indeterminate modulo the field modulus) is encoded as the integer
//! `a_0 + a_1 p + ... + a_{n-1} p^{n-1}`. The same encoding is the vertex order
//! of every graph built on the field.
//!
//! The modulus is the monic irreducible polynomial of degree `n` whose
//! non-leading coefficients have the smallest encoding, and the primitive
//! element is the generator of the multiplicative group with the smallest
//! encoding. Both choices are fixed so all downstream matrices are reproducible.

use crate::arith::{factor_u64, is_prime, mul_mod};
use crate::error::{Error, Result};

/// Default upper bound on the field size.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Which Cayley graph a connection set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphKind {
    Peisert,
    Paley,
}

impl GraphKind {
    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Peisert => "peisert",
            GraphKind::Paley => "paley",
        }
    }
}

impl std::str::FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peisert" => Ok(GraphKind::Peisert),
            "paley" => Ok(GraphKind::Paley),
            other => Err(Error::InvalidParameter(format!("unknown graph kind {other:?}"))),
        }
    }
}

/// A concrete finite field with log/antilog tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTable {
    p: u64,
    n: u32,
    q: u64,
    /// Coefficients `a_0..a_n` of the monic modulus, `a_n = 1`.
    modulus: Vec<u64>,
    beta: u32,
    /// `log[enc]` for nonzero `enc`; `log[0]` is unused.
    log: Vec<u32>,
    antilog: Vec<u32>,
    /// Base-p powers `p^0..p^{n-1}`.
    place: Vec<u64>,
}

// Polynomials over GF(p) are coefficient vectors, lowest degree first.

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let n = f.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (n..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for j in 0..n {
            let sub = c * f[j] % p;
            prod[d - n + j] = (prod[d - n + j] + p - sub) % p;
        }
    }
    prod.truncate(n.max(1));
    prod.resize(n, 0);
    prod
}

fn poly_powmod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let n = f.len() - 1;
    let mut acc = vec![0u64; n];
    acc[0] = 1;
    let mut b = base.to_vec();
    b.resize(n, 0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        exp >>= 1;
    }
    acc
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = crate::arith::inv_mod(b[db], p).expect("nonzero leading coefficient");
    loop {
        poly_trim(&mut r);
        if r.len() < b.len() || (r.len() == 1 && r[0] == 0) {
            return r;
        }
        let dr = r.len() - 1;
        let c = mul_mod(r[dr], lead_inv, p);
        for j in 0..=db {
            let sub = mul_mod(c, b[j], p);
            r[dr - db + j] = (r[dr - db + j] + p - sub) % p;
        }
    }
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Rabin's irreducibility test for a monic `f` of degree `n`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = (f.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    let x = {
        let mut v = vec![0u64; n as usize];
        v[1] = 1;
        v
    };
    // x^(p^k) mod f by repeated p-th powering.
    let frob = |k: u32| {
        let mut z = x.clone();
        for _ in 0..k {
            z = poly_powmod(&z, p, f, p);
        }
        z
    };
    let sub_x = |mut z: Vec<u64>| {
        z[1] = (z[1] + p - 1) % p;
        z
    };
    let full = sub_x(frob(n));
    if full.iter().any(|&c| c != 0) {
        return false;
    }
    for (d, _) in factor_u64(n as u64) {
        let g = poly_gcd(f, &sub_x(frob(n / d as u32)), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl FieldTable {
    /// Build GF(p^n) with the default size cap.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        Self::with_cap(p, n, DEFAULT_CAP)
    }

    pub fn with_cap(p: u64, n: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = crate::arith::checked_pow(p, n)
            .filter(|&q| q <= cap)
            .ok_or(Error::FieldTooLarge { p, n, cap })?;
        let nu = n as usize;
        let place: Vec<u64> = (0..n).map(|i| p.pow(i)).collect();
        let digits = |mut e: u64| -> Vec<u64> {
            (0..nu)
                .map(|_| {
                    let d = e % p;
                    e /= p;
                    d
                })
                .collect()
        };

        let modulus = (0..q)
            .map(|code| {
                let mut f = digits(code);
                f.push(1);
                f
            })
            .find(|f| is_irreducible(f, p))
            .expect("an irreducible polynomial of every degree exists");

        let order_factors: Vec<u64> = factor_u64(q - 1).into_iter().map(|(l, _)| l).collect();
        let beta = (1..q)
            .find(|&code| {
                let b = digits(code);
                order_factors.iter().all(|&l| {
                    let z = poly_powmod(&b, (q - 1) / l, &modulus, p);
                    !(z[0] == 1 && z[1..].iter().all(|&c| c == 0))
                })
            })
            .expect("the multiplicative group is cyclic");

        let beta_poly = digits(beta);
        let mut log = vec![u32::MAX; q as usize];
        let mut antilog = vec![0u32; (q - 1) as usize];
        let mut cur = vec![0u64; nu];
        cur[0] = 1;
        for e in 0..(q - 1) as usize {
            let enc: u64 = cur.iter().zip(&place).map(|(c, w)| c * w).sum();
            antilog[e] = enc as u32;
            log[enc as usize] = e as u32;
            cur = poly_mulmod(&cur, &beta_poly, &modulus, p);
        }

        Ok(FieldTable {
            p,
            n,
            q,
            modulus,
            beta: beta as u32,
            log,
            antilog,
            place,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Monic modulus coefficients `a_0, ..., a_n`.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn log_table(&self) -> &[u32] {
        &self.log
    }

    pub fn antilog_table(&self) -> &[u32] {
        &self.antilog
    }

    /// Discrete log base beta, `None` for zero.
    #[inline]
    pub fn log(&self, x: u32) -> Option<u32> {
        if x == 0 {
            None
        } else {
            Some(self.log[x as usize])
        }
    }

    /// `beta^e`, exponent taken modulo `q-1`.
    #[inline]
    pub fn exp(&self, e: u64) -> u32 {
        self.antilog[(e % (self.q - 1)) as usize]
    }

    pub fn digits(&self, x: u32) -> Vec<u64> {
        let mut e = x as u64;
        (0..self.n)
            .map(|_| {
                let d = e % self.p;
                e /= self.p;
                d
            })
            .collect()
    }

    pub fn encode(&self, coeffs: &[u64]) -> u32 {
        coeffs
            .iter()
            .zip(&self.place)
            .map(|(c, w)| (c % self.p) * w)
            .sum::<u64>() as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.n == 1 {
            return ((a as u64 + b as u64) % self.p) as u32;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        for w in &self.place {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * w;
            a /= self.p;
            b /= self.p;
        }
        out as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let mut a = a as u64;
        let mut out = 0u64;
        for w in &self.place {
            let d = (self.p - a % self.p) % self.p;
            out += d * w;
            a /= self.p;
        }
        out as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp(self.log[a as usize] as u64 + self.log[b as usize] as u64)
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        let l = self.log(a).ok_or(Error::ZeroElement)?;
        Ok(self.exp(self.q - 1 - l as u64))
    }

    /// The index of the coset of nonzero fourth powers containing `x`.
    pub fn quartic_class(&self, x: u32) -> Result<u32> {
        if self.q % 4 != 1 {
            return Err(Error::InvalidParameter(format!(
                "q = {} is not 1 mod 4",
                self.q
            )));
        }
        let l = self.log(x).ok_or(Error::ZeroElement)?;
        Ok(l % 4)
    }

    /// Connection set of the Peisert graph (quartic classes 0 and 1) or the
    /// Paley graph (nonzero squares), as sorted encodings.
    pub fn connection_set(&self, kind: GraphKind) -> Result<Vec<u32>> {
        let classes: [u32; 2] = match kind {
            GraphKind::Peisert => {
                if self.p % 4 != 3 || self.n % 2 != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "Peisert graphs need p = 3 mod 4 and even degree, got p = {}, n = {}",
                        self.p, self.n
                    )));
                }
                [0, 1]
            }
            GraphKind::Paley => {
                if self.q % 4 != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "Paley graphs need q = 1 mod 4, got q = {}",
                        self.q
                    )));
                }
                [0, 2]
            }
        };
        let mut set: Vec<u32> = (1..self.q as u32)
            .filter(|&x| classes.contains(&(self.log[x as usize] % 4)))
            .collect();
        set.sort_unstable();
        Ok(set)
    }
}
