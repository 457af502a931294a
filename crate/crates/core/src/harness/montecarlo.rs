//! Seeded Monte Carlo estimates of `lambda(A_gamma_1 ∪ ... ∪ A_gamma_k)`.
//!
//! The real coordinate is drawn on the grid `2^-53 Z ∩ [0, 1)` and each p-adic
//! coordinate as an integer uniform in `[0, p^k)`, which is Haar-uniform at
//! resolution `p^-k`. Samples are split into fixed chunks of `CHUNK_SIZE`; chunk
//! `c` uses a ChaCha8 generator seeded with the run seed on stream `c`, so the
//! result does not depend on how chunks are scheduled across threads.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::geometry::{AdelicPoint, FundamentalDomainPoint};
use crate::metric::ApproxSet;
use crate::places::PlaceSet;

pub const CHUNK_SIZE: u64 = 4096;
pub const ALGORITHM: &str = "chacha8/seed_from_u64/stream=chunk/chunk=4096";
const REAL_BITS: u32 = 53;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCEstimate {
    pub estimate: f64,
    /// `sqrt(estimate (1 - estimate) / samples)`
    pub standard_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub digits: u32,
    pub algorithm: String,
}

impl MCEstimate {
    fn from_hits(hits: u64, samples: u64, seed: u64, digits: u32) -> Self {
        let (estimate, standard_error) = if samples == 0 {
            (0.0, 0.0)
        } else {
            let e = hits as f64 / samples as f64;
            (e, (e * (1.0 - e) / samples as f64).sqrt())
        };
        Self {
            estimate,
            standard_error,
            samples,
            hits,
            seed,
            digits,
            algorithm: ALGORITHM.to_string(),
        }
    }

    /// Whether `|estimate - exact| <= k * standard_error`.
    pub fn within(&self, exact: f64, k: f64) -> bool {
        (self.estimate - exact).abs() <= k * self.standard_error
    }
}

/// A raw sample: `z_inf = real / 2^53` and the p-adic coordinates as integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSample {
    pub real: u64,
    pub padic: Vec<u64>,
}

impl RawSample {
    pub fn to_point(&self) -> AdelicPoint {
        let mut coords = vec![Rational::new(BigInt::from(self.real), BigInt::one() << REAL_BITS)];
        coords.extend(self.padic.iter().map(|&w| Rational::from_integer(w.into())));
        AdelicPoint::new(coords)
    }
}

fn digit_moduli(places: &PlaceSet, digits: u32) -> Result<Vec<u64>> {
    places
        .primes()
        .iter()
        .map(|&p| {
            p.checked_pow(digits).ok_or_else(|| {
                Error::OutOfRange(format!("{p}^{digits} does not fit in 64 bits"))
            })
        })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, moduli: &[u64]) -> RawSample {
    let real = rng.random::<u64>() >> (64 - REAL_BITS);
    let padic = moduli.iter().map(|&q| rng.random_range(0..q)).collect();
    RawSample { real, padic }
}

/// One point of `Z_P` with `digits` p-adic digits per finite place.
pub fn sample_fundamental_domain(
    rng: &mut ChaCha8Rng,
    places: &PlaceSet,
    digits: u32,
) -> Result<FundamentalDomainPoint> {
    if digits < 1 {
        return Err(Error::Config("digits must be at least 1".into()));
    }
    let moduli = digit_moduli(places, digits)?;
    FundamentalDomainPoint::new(draw(rng, &moduli).to_point(), places)
}

/// A generator for chunk `chunk` of the run with seed `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// `A_gamma` reduced to integers for fast membership of raw samples.
#[derive(Debug, Clone)]
pub struct CompiledSet {
    n: u64,
    rho_num: BigInt,
    rho_den: BigInt,
    /// `p^-e` for the ball measure `p^e`, one per finite place
    moduli: Vec<u64>,
}

impl CompiledSet {
    pub fn new(set: &ApproxSet) -> Result<Option<Self>> {
        if set.is_empty() {
            return Ok(None);
        }
        let moduli = set
            .places()
            .primes()
            .iter()
            .zip(set.ball_exponents())
            .map(|(&p, &e)| {
                u32::try_from(-e)
                    .ok()
                    .and_then(|k| p.checked_pow(k))
                    .ok_or_else(|| Error::OutOfRange(format!("ball {p}^{e} is too small to sample")))
            })
            .collect::<Result<_>>()?;
        Ok(Some(Self {
            n: set.unit(),
            rho_num: set.real_radius().numer().clone(),
            rho_den: set.real_radius().denom().clone(),
            moduli,
        }))
    }

    /// Digits needed so that `p^digits` is a multiple of every ball modulus.
    fn digits_needed(&self, places: &PlaceSet) -> u32 {
        places
            .primes()
            .iter()
            .zip(&self.moduli)
            .map(|(&p, &q)| {
                let mut k = 0;
                let mut acc = 1u64;
                while acc < q {
                    acc *= p;
                    k += 1;
                }
                k
            })
            .max()
            .unwrap_or(0)
    }

    /// Membership of a raw sample; only `b = round(n z_inf)` can qualify since
    /// the real radius is at most `1/(2n)`.
    pub fn contains(&self, s: &RawSample) -> bool {
        let n = self.n as u128;
        let nu = n * s.real as u128;
        let b = (nu + (1u128 << (REAL_BITS - 1))) >> REAL_BITS;
        if b.gcd(&n) != 1 {
            return false;
        }
        let diff = nu.abs_diff(b << REAL_BITS);
        let real_ok = match (
            self.rho_den.to_u128().and_then(|q| diff.checked_mul(q)),
            self.rho_num.to_u128().and_then(|p| p.checked_mul(n << REAL_BITS)),
        ) {
            (Some(l), Some(r)) => l < r,
            _ => BigInt::from(diff) * &self.rho_den < &self.rho_num * BigInt::from(n << REAL_BITS),
        };
        real_ok
            && self.moduli.iter().zip(&s.padic).all(|(&q, &w)| {
                let q = q as u128;
                (n % q) * (w as u128 % q) % q == b % q
            })
    }
}

/// Smallest admissible digit count for `sets`: every ball measure `p^e` must
/// be at least `p^-digits`.
pub fn required_digits(sets: &[ApproxSet], places: &PlaceSet) -> Result<u32> {
    let mut k = 1;
    for s in sets {
        if let Some(c) = CompiledSet::new(s)? {
            k = k.max(c.digits_needed(places));
        }
    }
    Ok(k)
}

/// Fraction of samples in at least one of `sets`.
pub fn mc_union_measure(
    sets: &[ApproxSet],
    places: &PlaceSet,
    samples: u64,
    digits: Option<u32>,
    seed: u64,
) -> Result<MCEstimate> {
    let needed = required_digits(sets, places)?;
    let digits = match digits {
        None => needed,
        Some(d) if d >= needed => d,
        Some(d) => {
            return Err(Error::PrecisionViolation(format!(
                "{d} digits given but the smallest ball needs {needed}"
            )))
        }
    };
    let moduli = digit_moduli(places, digits)?;
    let compiled: Vec<CompiledSet> = sets
        .iter()
        .map(CompiledSet::new)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if compiled.is_empty() {
        return Ok(MCEstimate::from_hits(0, samples, seed, digits));
    }
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK_SIZE.min(samples - c * CHUNK_SIZE);
            (0..len)
                .filter(|_| {
                    let s = draw(&mut rng, &moduli);
                    compiled.iter().any(|set| set.contains(&s))
                })
                .count() as u64
        })
        .sum();
    Ok(MCEstimate::from_hits(hits, samples, seed, digits))
}

/// The raw samples of chunk `chunk`, as drawn by [`mc_union_measure`].
pub fn chunk_samples(
    places: &PlaceSet,
    digits: u32,
    seed: u64,
    chunk: u64,
    len: u64,
) -> Result<Vec<RawSample>> {
    let moduli = digit_moduli(places, digits)?;
    let mut rng = chunk_rng(seed, chunk);
    Ok((0..len).map(|_| draw(&mut rng, &moduli)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::metric::{build_approx_set, PsiFunction};

    fn set(places: &PlaceSet, g: Rational, psi: &PsiFunction) -> ApproxSet {
        build_approx_set(&places.decompose(&g).unwrap(), psi, places).unwrap()
    }

    #[test]
    fn compiled_membership_matches_exact() {
        let psi = PsiFunction::scaled_cap(rat(1, 2)).unwrap();
        for primes in [vec![2], vec![3], vec![2, 3]] {
            let p = PlaceSet::new(&primes).unwrap();
            let sets: Vec<_> = [int(1), int(2), int(3), rat(5, 2), int(7), rat(7, 4), int(6)]
                .into_iter()
                .filter(|g| p.contains(g))
                .map(|g| set(&p, g, &psi))
                .collect();
            let digits = required_digits(&sets, &p).unwrap();
            for s in chunk_samples(&p, digits, 11, 0, 3000).unwrap() {
                let z = s.to_point();
                for a in &sets {
                    let c = CompiledSet::new(a).unwrap().unwrap();
                    assert_eq!(c.contains(&s), a.contains(&z), "gamma={} z={:?}", a.gamma(), z);
                }
            }
        }
    }

    #[test]
    fn empty_union_is_zero() {
        let p = PlaceSet::new(&[2]).unwrap();
        let e = mc_union_measure(&[], &p, 1000, None, 1).unwrap();
        assert_eq!((e.estimate, e.standard_error, e.hits), (0.0, 0.0, 0));
    }

    #[test]
    fn deterministic_and_precision_checked() {
        let p = PlaceSet::new(&[2]).unwrap();
        let psi = PsiFunction::scaled_cap(rat(1, 2)).unwrap();
        let sets = vec![set(&p, int(3), &psi)];
        let a = mc_union_measure(&sets, &p, 10_000, None, 5).unwrap();
        let b = mc_union_measure(&sets, &p, 10_000, None, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digits, 3);
        assert!(matches!(
            mc_union_measure(&sets, &p, 10, Some(2), 5),
            Err(Error::PrecisionViolation(_))
        ));
    }

    #[test]
    fn single_digit_frequencies() {
        let p = PlaceSet::new(&[2]).unwrap();
        let mut rng = chunk_rng(3, 0);
        let ones = (0..10_000)
            .filter(|_| {
                let z = sample_fundamental_domain(&mut rng, &p, 1).unwrap();
                z.point().coords()[1] == int(1)
            })
            .count() as f64;
        let sigma = (10_000.0f64 * 0.25).sqrt();
        assert!((ones - 5000.0).abs() <= 3.0 * sigma);
    }
}
