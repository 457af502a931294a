//! Places of Q, the ring `P^-1 Z` of rationals whose denominators only use the
//! finite primes of `P`, and the canonical decomposition
//! `gamma = sign * n * p_1^nu_1 * ... * p_r^nu_r` with `n` coprime to every `p_i`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// `P = {inf, p_1 < ... < p_r}` with `M = max p_i` and `Pi = p_1 * ... * p_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlaceSet {
    primes: Vec<u64>,
    max_prime: u64,
    prime_product: u64,
}

impl PlaceSet {
    pub fn new(primes: &[u64]) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::NoFinitePlaces);
        }
        let mut sorted = primes.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicatePrime(w[0]));
            }
        }
        if let Some(&p) = sorted.iter().find(|&&p| !arith::is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        let prime_product = sorted
            .iter()
            .try_fold(1u64, |acc, &p| acc.checked_mul(p))
            .ok_or_else(|| Error::OutOfRange("product of primes overflows u64".into()))?;
        Ok(Self {
            max_prime: *sorted.last().unwrap(),
            primes: sorted,
            prime_product,
        })
    }

    /// Finite primes in increasing order.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of finite places.
    pub fn r(&self) -> usize {
        self.primes.len()
    }

    /// Number of places including infinity.
    pub fn len(&self) -> usize {
        self.primes.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn places(&self) -> impl Iterator<Item = Place> + '_ {
        std::iter::once(Place::Infinite).chain(self.primes.iter().map(|&p| Place::Finite(p)))
    }

    /// `M`, the largest finite prime.
    pub fn max_prime(&self) -> u64 {
        self.max_prime
    }

    /// `Pi`, the product of the finite primes.
    pub fn prime_product(&self) -> u64 {
        self.prime_product
    }

    /// Canonical decomposition of `q`; fails if the denominator of `q` has a
    /// prime factor outside the place set.
    pub fn decompose(&self, q: &Rational) -> Result<PzElement> {
        if q.is_zero() {
            return Ok(PzElement::zero(self.r()));
        }
        let mut num = q.numer().abs();
        let mut den = q.denom().clone();
        let exponents = self
            .primes
            .iter()
            .map(|&p| arith::strip_prime(&mut num, p) - arith::strip_prime(&mut den, p))
            .collect();
        if !den.is_one() {
            return Err(Error::NotInLocalization(arith::format_rational(q)));
        }
        Ok(PzElement {
            value: q.clone(),
            unit: num,
            exponents,
        })
    }

    /// Builds `sign * n * prod p_i^nu_i`, checking that `n` is a unit part.
    pub fn compose(&self, sign: i8, n: BigInt, exponents: Vec<i64>) -> Result<PzElement> {
        if exponents.len() != self.r() {
            return Err(Error::MismatchedPlaces {
                expected: self.r(),
                found: exponents.len(),
            });
        }
        if sign == 0 {
            return Ok(PzElement::zero(self.r()));
        }
        if !n.is_positive() {
            return Err(Error::NotPositive("unit part n"));
        }
        for &p in &self.primes {
            if (&n % p).is_zero() {
                return Err(Error::Parse(format!("unit part {n} is divisible by {p}")));
            }
        }
        let mut value = Rational::from_integer(n.clone());
        for (&p, &e) in self.primes.iter().zip(&exponents) {
            value *= arith::pow(p, e);
        }
        if sign < 0 {
            value = -value;
        }
        Ok(PzElement {
            value,
            unit: n,
            exponents,
        })
    }

    /// `|gamma|_v` at the place with index `idx` (0 is infinity).
    pub fn abs_at(&self, gamma: &PzElement, idx: usize) -> Rational {
        if gamma.is_zero() {
            return Rational::zero();
        }
        if idx == 0 {
            gamma.value.abs()
        } else {
            arith::pow(self.primes[idx - 1], -gamma.exponents[idx - 1])
        }
    }

    /// Level `l(gamma) = max_v |gamma|_v`; `l(0) = 0`.
    pub fn level(&self, gamma: &PzElement) -> Rational {
        (0..self.len())
            .map(|i| self.abs_at(gamma, i))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `L(gamma) = max_v n / |gamma|_v`.
    pub fn big_l(&self, gamma: &PzElement) -> Result<Rational> {
        if gamma.is_zero() {
            return Err(Error::ZeroArgument("gamma"));
        }
        let n = Rational::from_integer(gamma.unit.clone());
        Ok((0..self.len())
            .map(|i| &n / self.abs_at(gamma, i))
            .max()
            .expect("place set is never empty"))
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.decompose(q).is_ok()
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{inf")?;
        for p in &self.primes {
            write!(f, ",{p}")?;
        }
        write!(f, "}}")
    }
}

/// An element of `P^-1 Z` together with its canonical decomposition.
///
/// Zero is stored with unit part 0 and all exponents 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PzElement {
    value: Rational,
    unit: BigInt,
    exponents: Vec<i64>,
}

impl PzElement {
    /// Trusted constructor for callers that already hold the decomposition.
    pub(crate) fn from_parts(value: Rational, unit: BigInt, exponents: Vec<i64>) -> Self {
        Self {
            value,
            unit,
            exponents,
        }
    }

    pub fn zero(r: usize) -> Self {
        Self {
            value: Rational::zero(),
            unit: BigInt::zero(),
            exponents: vec![0; r],
        }
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    /// The unit-part magnitude `n`.
    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn unit_u64(&self) -> Result<u64> {
        self.unit
            .to_u64()
            .ok_or_else(|| Error::OutOfRange(format!("unit part {} exceeds u64", self.unit)))
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn sign(&self) -> i8 {
        if self.value.is_positive() {
            1
        } else if self.value.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_positive()
    }
}

impl fmt::Display for PzElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&arith::format_rational(&self.value))
    }
}

/// `gcd(beta, gamma) = gcd(m, n)` of the unit parts; `gcd(0, gamma) = n`.
pub fn gcd_pz(beta: &PzElement, gamma: &PzElement) -> Result<BigInt> {
    if beta.is_zero() && gamma.is_zero() {
        return Err(Error::ZeroArgument("beta and gamma"));
    }
    Ok(beta.unit.gcd(&gamma.unit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn p2() -> PlaceSet {
        PlaceSet::new(&[2]).unwrap()
    }

    fn p23() -> PlaceSet {
        PlaceSet::new(&[3, 2]).unwrap()
    }

    #[test]
    fn place_set_construction() {
        let p = p23();
        assert_eq!(p.primes(), &[2, 3]);
        assert_eq!(p.max_prime(), 3);
        assert_eq!(p.prime_product(), 6);
        assert_eq!(p.len(), 3);
        assert!(matches!(PlaceSet::new(&[]), Err(Error::NoFinitePlaces)));
        assert!(matches!(PlaceSet::new(&[4]), Err(Error::NotPrime(4))));
        assert!(matches!(PlaceSet::new(&[3, 3]), Err(Error::DuplicatePrime(3))));
    }

    #[test]
    fn decompose_examples() {
        let g = p23().decompose(&rat(20, 9)).unwrap();
        assert_eq!(g.sign(), 1);
        assert_eq!(g.unit(), &BigInt::from(5));
        assert_eq!(g.exponents(), &[2, -2]);

        let one = p2().decompose(&int(1)).unwrap();
        assert_eq!((one.sign(), one.unit().clone()), (1, BigInt::one()));
        assert_eq!(one.exponents(), &[0]);

        assert!(matches!(
            p2().decompose(&rat(1, 7)),
            Err(Error::NotInLocalization(_))
        ));

        let neg = p2().decompose(&rat(-3, 8)).unwrap();
        assert_eq!(neg.sign(), -1);
        assert_eq!(neg.exponents(), &[-3]);
    }

    #[test]
    fn compose_round_trip() {
        let p = p23();
        let g = p.compose(-1, BigInt::from(35), vec![-1, 4]).unwrap();
        assert_eq!(g.value(), &rat(-35 * 81, 2));
        assert_eq!(p.decompose(g.value()).unwrap(), g);
        assert!(p.compose(1, BigInt::from(6), vec![0, 0]).is_err());
        assert!(p.compose(0, BigInt::from(6), vec![0, 0]).unwrap().is_zero());
    }

    #[test]
    fn level_examples() {
        let p = p23();
        assert_eq!(p.level(&p.decompose(&rat(5, 2)).unwrap()), rat(5, 2));
        assert_eq!(p.level(&p.decompose(&int(1)).unwrap()), int(1));
        let q = p2();
        assert_eq!(q.level(&q.decompose(&int(12)).unwrap()), int(12));
        assert_eq!(q.level(&PzElement::zero(1)), int(0));
    }

    #[test]
    fn big_l_examples() {
        let q = p2();
        assert_eq!(q.big_l(&q.decompose(&int(12)).unwrap()).unwrap(), int(12));
        assert_eq!(q.big_l(&q.decompose(&int(1)).unwrap()).unwrap(), int(1));
        let p = p23();
        assert_eq!(p.big_l(&p.decompose(&rat(5, 2)).unwrap()).unwrap(), int(5));
        assert!(q.big_l(&PzElement::zero(1)).is_err());
    }

    #[test]
    fn gcd_examples() {
        let q = p2();
        let d = |x: i64| q.decompose(&int(x)).unwrap();
        assert_eq!(gcd_pz(&d(6), &d(9)).unwrap(), BigInt::from(3));
        assert_eq!(gcd_pz(&d(4), &d(8)).unwrap(), BigInt::one());
        assert_eq!(gcd_pz(&d(1), &d(45)).unwrap(), BigInt::one());
        assert_eq!(gcd_pz(&PzElement::zero(1), &d(12)).unwrap(), BigInt::from(3));
        assert!(gcd_pz(&PzElement::zero(1), &PzElement::zero(1)).is_err());
    }
}
