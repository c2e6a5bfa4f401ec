//! Small integer helpers shared by the other modules.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    // Miller-Rabin with a base set that is deterministic for all u64.
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// The p-adic valuation of a nonzero integer.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_big(n: &BigUint, p: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quot, rem) = n.div_rem(&p);
        if !rem.is_zero() {
            return v;
        }
        n = quot;
        v += 1;
    }
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorisation of a u64 as `(prime, exponent)` pairs in increasing order.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut stack = vec![n];
    let mut rest = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        let mut m = m;
        for small in 2u64..1000 {
            while m % small == 0 {
                primes.push(small);
                m /= small;
            }
        }
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            rest.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    primes.extend(rest);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factor a big integer whose prime factors, after removing those below 10^6,
/// leave a cofactor that fits in a u64.
pub fn factor_big(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::Factorization("0".into()));
    }
    let mut n = n.clone();
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut d = 2u64;
    while d < 1_000_000 {
        if let Some(small) = n.to_u64() {
            for (p, e) in factor_u64(small) {
                match out.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, f)) => *f += e,
                    None => out.push((p, e)),
                }
            }
            out.sort_unstable();
            return Ok(out);
        }
        let bd = BigUint::from(d);
        let mut e = 0;
        loop {
            let (quot, rem) = n.div_rem(&bd);
            if !rem.is_zero() {
                break;
            }
            n = quot;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n.is_one() {
        return Ok(out);
    }
    Err(Error::Factorization(n.to_string()))
}

pub fn is_perfect_square(n: u64) -> Option<u64> {
    let s = (n as f64).sqrt().round() as u64;
    (s.saturating_sub(2)..=s + 2).find(|&c| c.checked_mul(c) == Some(n))
}

/// Returns `(p, n)` with `q = p^n`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = factor_u64(q);
    match f.as_slice() {
        [(p, n)] => Some((*p, *n)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(2_305_843_009_213_693_951));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn factorisation() {
        assert_eq!(factor_u64(132_860), vec![(2, 2), (5, 1), (7, 1), (13, 1), (73, 1)]);
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(999_983 * 1_000_003), vec![(999_983, 1), (1_000_003, 1)]);
        let big = BigUint::from(3u32).pow(40) * BigUint::from(20u32).pow(3);
        assert_eq!(factor_big(&big).unwrap(), vec![(2, 6), (3, 40), (5, 3)]);
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(2, 27), Some(14));
        assert_eq!(inv_mod(3, 27), None);
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(12), None);
        assert_eq!(is_perfect_square(121), Some(11));
        assert_eq!(is_perfect_square(27), None);
    }
}
