//! Base-p digit combinatorics modulo `q - 1`.
//!
//! For `q = p^m` with `p = 3 (mod 4)` and `m = 2t` even, every residue `j` not
//! divisible by `q - 1` has a unique representative in `1..q-1` and hence a
//! unique `m`-digit base-p expansion. `s(j)` is its digit sum and
//! `c(i, j) = (s(i) + s(j) - s(i + j)) / (p - 1)` counts the carries when `i`
//! and `j` are added with the carry out of the top digit wrapped around to the
//! bottom. By Stickelberger's theorem `c(i, j)` is the p-adic valuation of the
//! Jacobi sum `J(T^{-i}, T^{-j})`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CarryContext {
    p: u64,
    m: u32,
    q: u64,
    r: u64,
}

/// One of the classes `{i, i+r, i+2r, i+3r}` indexing the summand `M_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidueClass {
    pub rep: u64,
    pub members: [u64; 4],
}

impl CarryContext {
    /// Context for `q = p^m`. Requires `p = 3 (mod 4)` prime and `m` even and
    /// positive, which forces `q = 1 (mod 8)`.
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p % 4 != 3 || m == 0 || m % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "digit context needs p = 3 mod 4 and a positive even digit count, got p = {p}, m = {m}"
            )));
        }
        let q = crate::arith::checked_pow(p, m)
            .ok_or_else(|| Error::InvalidParameter(format!("{p}^{m} overflows")))?;
        Ok(CarryContext { p, m, q, r: (q - 1) / 4 })
    }

    /// Context for `q = p^{2t}`.
    pub fn from_t(p: u64, t: u32) -> Result<Self> {
        Self::new(p, 2 * t)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of digits, `2t`.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t(&self) -> u32 {
        self.m / 2
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// Representative of `j` modulo `q - 1` in `1..q-1`.
    fn reduce(&self, j: i64) -> Result<u64> {
        let j = j.rem_euclid((self.q - 1) as i64) as u64;
        if j == 0 {
            return Err(Error::ZeroResidue(0));
        }
        Ok(j)
    }

    pub fn p_digits(&self, j: i64) -> Result<Vec<u64>> {
        let mut j = self.reduce(j)?;
        Ok((0..self.m)
            .map(|_| {
                let d = j % self.p;
                j /= self.p;
                d
            })
            .collect())
    }

    /// Digit sum `s(j)`.
    pub fn digit_sum(&self, j: i64) -> Result<u64> {
        let mut j = self.reduce(j)?;
        let mut s = 0;
        while j > 0 {
            s += j % self.p;
            j /= self.p;
        }
        Ok(s)
    }

    /// `c(i, j)`; requires `i`, `j` and `i + j` all nonzero modulo `q - 1`.
    pub fn carry_count(&self, i: i64, j: i64) -> Result<u32> {
        let si = self.digit_sum(i)?;
        let sj = self.digit_sum(j)?;
        let sij = self.digit_sum(i + j)?;
        let num = si + sj - sij;
        debug_assert_eq!(num % (self.p - 1), 0);
        Ok((num / (self.p - 1)) as u32)
    }

    /// Carry count for arguments already known to be valid.
    pub(crate) fn c(&self, i: u64, j: u64) -> u32 {
        self.carry_count(i as i64, j as i64)
            .expect("carry count called on a residue divisible by q-1")
    }

    /// The `(q-5)/4` classes with representatives `1..r-1` in increasing order.
    pub fn class_reps(&self) -> Vec<ResidueClass> {
        let n = self.q - 1;
        (1..self.r)
            .map(|i| ResidueClass {
                rep: i,
                members: [i, (i + self.r) % n, (i + 2 * self.r) % n, (i + 3 * self.r) % n],
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Carries of the cyclic addition, counted digit by digit: add in base p,
    /// and feed any carry out of the top digit back into digit 0 until none
    /// remain.
    fn cyclic_carries(p: u64, m: u32, i: u64, j: u64) -> u32 {
        let digits = |mut x: u64| -> Vec<u64> {
            (0..m)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let a = digits(i);
        let b = digits(j);
        let mut sum = vec![0u64; m as usize];
        let mut carries = 0;
        let mut carry = 0;
        for k in 0..m as usize {
            let v = a[k] + b[k] + carry;
            sum[k] = v % p;
            carry = v / p;
            carries += carry as u32;
        }
        while carry > 0 {
            let mut k = 0;
            let mut c = carry;
            while c > 0 && k < m as usize {
                let v = sum[k] + c;
                sum[k] = v % p;
                c = v / p;
                carries += c as u32;
                k += 1;
            }
            carry = c;
        }
        carries
    }

    #[test]
    fn digits_for_q9() {
        let ctx = CarryContext::new(3, 2).unwrap();
        assert_eq!(ctx.r(), 2);
        assert_eq!(ctx.p_digits(2).unwrap(), vec![2, 0]);
        assert_eq!(ctx.p_digits(4).unwrap(), vec![1, 1]);
        assert_eq!(ctx.p_digits(7).unwrap(), vec![1, 2]);
        assert_eq!(ctx.p_digits(8), Err(Error::ZeroResidue(0)));
        assert_eq!(ctx.digit_sum(2).unwrap(), 2);
        assert_eq!(ctx.digit_sum(4).unwrap(), 2);
        assert_eq!(ctx.digit_sum(7).unwrap(), 3);
    }

    #[test]
    fn carries_for_q9() {
        let ctx = CarryContext::new(3, 2).unwrap();
        assert_eq!(ctx.carry_count(2, 2).unwrap(), 1);
        assert_eq!(ctx.carry_count(1, 2).unwrap(), 1);
        assert_eq!(ctx.carry_count(1, 6).unwrap(), 0);
        assert!(ctx.carry_count(2, 6).is_err());
        assert!(ctx.carry_count(0, 3).is_err());
    }

    #[test]
    fn digits_of_r_2r_3r() {
        for (p, t) in [(3u64, 1u32), (7, 1), (3, 2), (11, 1), (7, 2), (3, 3)] {
            let ctx = CarryContext::from_t(p, t).unwrap();
            let r = ctx.r() as i64;
            let dr = ctx.p_digits(r).unwrap();
            let d3r = ctx.p_digits(3 * r).unwrap();
            for (k, (&a, &b)) in dr.iter().zip(&d3r).enumerate() {
                let (hi, lo) = ((3 * p - 1) / 4, (p - 3) / 4);
                if k % 2 == 0 {
                    assert_eq!((a, b), (hi, lo));
                } else {
                    assert_eq!((a, b), (lo, hi));
                }
            }
            assert!(ctx.p_digits(2 * r).unwrap().iter().all(|&d| d == (p - 1) / 2));
            let tp = t as u64 * (p - 1);
            assert_eq!(ctx.digit_sum(r).unwrap(), tp);
            assert_eq!(ctx.digit_sum(2 * r).unwrap(), tp);
            assert_eq!(ctx.digit_sum(3 * r).unwrap(), tp);
        }
    }

    #[test]
    fn class_structure() {
        let ctx = CarryContext::new(3, 2).unwrap();
        let classes = ctx.class_reps();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].members, [1, 3, 5, 7]);
        for (p, m, count) in [(7u64, 2u32, 11usize), (3, 4, 19), (11, 2, 29)] {
            let ctx = CarryContext::new(p, m).unwrap();
            let classes = ctx.class_reps();
            assert_eq!(classes.len(), count);
            assert_eq!(classes.len() as u64, (ctx.q() - 5) / 4);
            let mut seen = std::collections::BTreeSet::new();
            for c in &classes {
                for &x in &c.members {
                    assert!(seen.insert(x));
                }
            }
            let r = ctx.r();
            let expected: std::collections::BTreeSet<u64> = (1..ctx.q() - 1)
                .filter(|&x| x % r != 0)
                .collect();
            assert_eq!(seen, expected);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CarryContext::new(5, 2).is_err());
        assert!(CarryContext::new(3, 3).is_err());
        assert!(CarryContext::new(9, 2).is_err());
    }

    #[test]
    fn formula_matches_cyclic_carries_exhaustively() {
        for (p, m) in [(3u64, 2u32), (7, 2), (3, 4)] {
            let ctx = CarryContext::new(p, m).unwrap();
            let n = ctx.q() - 1;
            for i in 1..n {
                for j in 1..n {
                    if (i + j) % n == 0 {
                        continue;
                    }
                    assert_eq!(ctx.c(i, j), cyclic_carries(p, m, i, j), "p={p} m={m} i={i} j={j}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn carry_count_symmetric_and_bounded(i in 1u64..728, j in 1u64..728) {
            let ctx = CarryContext::new(3, 6).unwrap();
            prop_assume!((i + j) % 728 != 0);
            let c = ctx.c(i, j);
            prop_assert_eq!(c, ctx.c(j, i));
            prop_assert!(c <= ctx.m());
            prop_assert_eq!(c, cyclic_carries(3, 6, i, j));
        }

        #[test]
        fn complementary_digit_sums(j in 1u64..2400) {
            let ctx = CarryContext::new(7, 4).unwrap();
            let s = ctx.digit_sum(j as i64).unwrap() + ctx.digit_sum(2400 - j as i64).unwrap();
            prop_assert_eq!(s, 4 * 6);
        }
    }
}
