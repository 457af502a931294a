//! Exact rational helpers: p-adic valuations and absolute values, integer
//! logarithms, totients, and the `num/den` text format.
//!
//! Everything here works over arbitrary-precision integers. Nothing touches
//! floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler's totient by trial-division factoring.
pub fn totient(mut n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut result = n;
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Strips every factor of `p` from `n` and returns how many were removed.
pub(crate) fn strip_prime(n: &mut BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut count = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return count;
        }
        *n = q;
        count += 1;
    }
}

/// `v` with `q = p^v * (u/w)` and `p` dividing neither `u` nor `w`.
pub fn padic_valuation(q: &Rational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let mut num = q.numer().clone();
    let mut den = q.denom().clone();
    Ok(strip_prime(&mut num, p) - strip_prime(&mut den, p))
}

/// `|q|_p = p^(-v_p(q))`, with `|0|_p = 0`.
pub fn padic_abs(q: &Rational, p: u64) -> Rational {
    match padic_valuation(q, p) {
        Ok(v) => pow(p, -v),
        Err(_) => Rational::zero(),
    }
}

/// `p^e` for any integer exponent.
pub fn pow(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p);
    let mag = num_traits::pow(base, e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// Largest `e` with `p^e <= x`, for `x > 0`.
pub fn floor_log(p: u64, x: &Rational) -> i64 {
    debug_assert!(x.is_positive());
    let pb = BigInt::from(p);
    let num = x.numer();
    let den = x.denom();
    if num >= den {
        // p^e * den <= num
        let mut e = 0i64;
        let mut acc = den.clone();
        loop {
            let next = &acc * &pb;
            if &next > num {
                return e;
            }
            acc = next;
            e += 1;
        }
    } else {
        // den <= num * p^k, smallest such k gives e = -k
        let mut k = 0i64;
        let mut acc = num.clone();
        while &acc < den {
            acc *= &pb;
            k += 1;
        }
        -k
    }
}

/// Integer floor of a rational.
pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - Rational::from_integer(floor(q))
}

/// Inverse of `a` modulo `m` (`gcd(a, m) = 1`, `m >= 1`), in `[0, m)`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Serialises as `num/den`, always with an explicit denominator.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Converts a rational to the nearest `f64`, for display only.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&int(12), 2).unwrap(), 2);
        assert_eq!(padic_valuation(&int(1), 7).unwrap(), 0);
        assert_eq!(padic_valuation(&rat(5, 27), 3).unwrap(), -3);
        assert!(matches!(
            padic_valuation(&int(0), 3),
            Err(Error::ZeroValuation)
        ));
    }

    #[test]
    fn abs_examples() {
        assert_eq!(padic_abs(&int(12), 2), rat(1, 4));
        assert_eq!(padic_abs(&int(0), 3), int(0));
        assert_eq!(padic_abs(&rat(5, 27), 3), int(27));
        assert_eq!(padic_abs(&rat(-5, 27), 3), int(27));
    }

    #[test]
    fn floor_log_brackets() {
        for (num, den) in [(3, 4), (1, 9), (1, 6), (7, 1), (8, 1), (1, 1), (1, 1000)] {
            for p in [2u64, 3, 5] {
                let x = rat(num, den);
                let e = floor_log(p, &x);
                assert!(pow(p, e) <= x);
                assert!(pow(p, e + 1) > x);
            }
        }
    }

    #[test]
    fn primes_and_totients() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        let phi: Vec<u64> = (1..=12).map(totient).collect();
        assert_eq!(phi, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn rational_text_format() {
        assert_eq!(format_rational(&rat(20, 48)), "5/12");
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(parse_rational(" -10/4 ").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn inverse_and_floor() {
        let inv = mod_inverse(&BigInt::from(3), &BigInt::from(4)).unwrap();
        assert_eq!(inv, BigInt::from(3));
        assert!(mod_inverse(&BigInt::from(2), &BigInt::from(4)).is_none());
        assert_eq!(floor(&rat(-1, 3)), BigInt::from(-1));
        assert_eq!(frac(&rat(-1, 3)), rat(2, 3));
    }
}
