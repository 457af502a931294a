//! Exact overlaps `lambda(A_beta ∩ A_gamma)` and the quantities of the
//! counting argument that bounds them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::places::{PlaceSet, PzElement};

use super::approx_set::ApproxSet;
use super::psi::PsiFunction;

/// Exact `lambda(A_beta ∩ A_gamma)`.
///
/// Box `a/m` of `A_beta` meets box `b'/n + iota(k)` of `A_gamma` only through
/// `X = a n - b' m`: the real overlap depends on `|X| / (m n)` and the p-adic
/// balls meet iff `|X|_p` is at most the larger ball measure. The sum runs over
/// `a` coprime to `m` and every integer `b'` coprime to `n` in reach, with the
/// real and p-adic factors aggregated in integers.
pub fn overlap_of_sets(a_set: &ApproxSet, b_set: &ApproxSet) -> Rational {
    if a_set.is_empty() || b_set.is_empty() {
        return Rational::zero();
    }
    let places = a_set.places();
    let m = a_set.unit();
    let n = b_set.unit();
    let rho1 = a_set.real_radius();
    let rho2 = b_set.real_radius();
    let mn = Rational::from_integer(BigInt::from(m) * BigInt::from(n));

    // p-adic factor and the modulus X must be divisible by
    let mut padic = Rational::one();
    let mut modulus = BigInt::one();
    for ((&p, &e1), &e2) in places
        .primes()
        .iter()
        .zip(a_set.ball_exponents())
        .zip(b_set.ball_exponents())
    {
        padic *= arith::pow(p, e1.min(e2));
        modulus *= BigInt::from(p).pow((-e1.max(e2)) as u32);
    }

    let full_below = (rho1 - rho2).abs() * &mn;
    let reach = (rho1 + rho2) * &mn;
    // largest integer strictly below reach
    let t_max: BigInt = reach.ceil().to_integer() - 1;

    let mut full = BigInt::zero();
    let mut partial = BigInt::zero();
    let mut partial_t = BigInt::zero();
    let n_big = BigInt::from(n);
    let m_big = BigInt::from(m);
    for a in (1..=m).filter(|&a| arith::gcd_u64(a, m) == 1) {
        let an = BigInt::from(a) * &n_big;
        let lo = Integer::div_ceil(&(&an - &t_max), &m_big);
        let hi = Integer::div_floor(&(&an + &t_max), &m_big);
        let mut b: BigInt = lo;
        while b <= hi {
            let x = &an - &b * &m_big;
            if b.gcd(&n_big).is_one() && x.is_multiple_of(&modulus) {
                let t = x.abs();
                if Rational::from_integer(t.clone()) <= full_below {
                    full += 1;
                } else {
                    partial += 1;
                    partial_t += t;
                }
            }
            b += 1;
        }
    }
    let two_min = Rational::from_integer(2.into()) * std::cmp::min(rho1, rho2);
    let real = Rational::from_integer(full) * two_min
        + Rational::from_integer(partial) * (rho1 + rho2)
        - Rational::from_integer(partial_t) / mn;
    real * padic
}

/// `lambda(A_beta(psi) ∩ A_gamma(psi))`, exact.
pub fn overlap_measure(
    beta: &PzElement,
    gamma: &PzElement,
    psi: &PsiFunction,
    places: &PlaceSet,
) -> Result<Rational> {
    let a = super::approx_set::build_approx_set(beta, psi, places)?;
    let b = super::approx_set::build_approx_set(gamma, psi, places)?;
    Ok(overlap_of_sets(&a, &b))
}

/// The same overlap summed box pair by box pair.
pub fn overlap_by_box_pairs(a_set: &ApproxSet, b_set: &ApproxSet) -> Rational {
    let other: Vec<_> = b_set.boxes().collect();
    a_set
        .boxes()
        .map(|x| {
            other
                .iter()
                .fold(Rational::zero(), |acc, y| acc + x.intersection_measure(y))
        })
        .fold(Rational::zero(), |acc, v| acc + v)
}

/// `16 psi(beta)^(r+1) psi(gamma)^(r+1)`
pub fn lemma5_bound(psi_beta: &Rational, psi_gamma: &Rational, places: &PlaceSet) -> Rational {
    num_traits::pow(psi_beta * psi_gamma, places.r() + 1) * Rational::from_integer(16.into())
}

/// Real and p-adic diameters of a pair of approximation sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapGeometry {
    pub m: u64,
    pub n: u64,
    /// `2 max(psi(beta)/|beta|, psi(gamma)/|gamma|)`
    pub big_delta_inf: Rational,
    pub small_delta_inf: Rational,
    /// `max(p^mu psi(beta), p^nu psi(gamma))` per finite place
    pub big_delta_p: Vec<Rational>,
    pub small_delta_p: Vec<Rational>,
    /// `p^-tau <= Delta_p < p^(1 - tau)`
    pub tau: Vec<i64>,
}

impl OverlapGeometry {
    pub fn new(
        beta: &PzElement,
        gamma: &PzElement,
        psi_beta: &Rational,
        psi_gamma: &Rational,
        places: &PlaceSet,
    ) -> Result<Self> {
        if !beta.is_positive() {
            return Err(Error::NotPositive("beta"));
        }
        if !gamma.is_positive() {
            return Err(Error::NotPositive("gamma"));
        }
        if !psi_beta.is_positive() || !psi_gamma.is_positive() {
            return Err(Error::InvalidPsi("overlap geometry needs psi > 0".into()));
        }
        let two = Rational::from_integer(2.into());
        let rb = &two * psi_beta / beta.value();
        let rg = &two * psi_gamma / gamma.value();
        let mut big = Vec::new();
        let mut small = Vec::new();
        let mut tau = Vec::new();
        for (i, &p) in places.primes().iter().enumerate() {
            let x = arith::pow(p, beta.exponents()[i]) * psi_beta;
            let y = arith::pow(p, gamma.exponents()[i]) * psi_gamma;
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            tau.push(-arith::floor_log(p, &hi));
            big.push(hi);
            small.push(lo);
        }
        let (small_inf, big_inf) = if rb <= rg { (rb, rg) } else { (rg, rb) };
        Ok(Self {
            m: beta.unit_u64()?,
            n: gamma.unit_u64()?,
            big_delta_inf: big_inf,
            small_delta_inf: small_inf,
            big_delta_p: big,
            small_delta_p: small,
            tau,
        })
    }

    pub fn from_psi(
        beta: &PzElement,
        gamma: &PzElement,
        psi: &PsiFunction,
        places: &PlaceSet,
    ) -> Result<Self> {
        let pb = psi.eval(beta, places)?;
        let pg = psi.eval(gamma, places)?;
        Self::new(beta, gamma, &pb, &pg, places)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapCount {
    /// `#N(beta, gamma)` by brute force
    pub count: u64,
    /// `4 m n Delta_inf prod Delta_p`
    pub bound: Rational,
    /// `4 m n Delta_inf prod p^-tau`
    pub tau_bound: Rational,
    pub within_bound: bool,
}

/// Pairs `1 <= a <= m`, `1 <= b <= n` with `|a n - b m| <= window` and
/// `|a n - b m|_p <= limit_p` for each finite place.
pub fn count_window_pairs(
    m: u64,
    n: u64,
    window: &Rational,
    padic_limits: &[(u64, Rational)],
) -> u64 {
    let mut count = 0;
    for a in 1..=m {
        for b in 1..=n {
            let x = a as i128 * n as i128 - b as i128 * m as i128;
            let xr = Rational::from_integer(x.into());
            if &xr.abs() <= window
                && padic_limits
                    .iter()
                    .all(|(p, lim)| &arith::padic_abs(&xr, *p) <= lim)
            {
                count += 1;
            }
        }
    }
    count
}

/// `#N(beta, gamma)` together with the chain of upper bounds for it.
pub fn overlap_count_n(geom: &OverlapGeometry, places: &PlaceSet) -> OverlapCount {
    let mn = Rational::from_integer(BigInt::from(geom.m) * BigInt::from(geom.n));
    let window = &mn * &geom.big_delta_inf;
    let limits: Vec<_> = places
        .primes()
        .iter()
        .copied()
        .zip(geom.big_delta_p.iter().cloned())
        .collect();
    let count = count_window_pairs(geom.m, geom.n, &window, &limits);
    let four = Rational::from_integer(4.into()) * &window;
    let bound = geom.big_delta_p.iter().fold(four.clone(), |acc, d| acc * d);
    let tau_bound = places
        .primes()
        .iter()
        .zip(&geom.tau)
        .fold(four, |acc, (&p, &t)| acc * arith::pow(p, -t));
    let within_bound = Rational::from_integer(count.into()) <= bound;
    OverlapCount {
        count,
        bound,
        tau_bound,
        within_bound,
    }
}

/// Solutions of `a n - b m = x` with `1 <= a <= m`, `1 <= b <= n`.
///
/// Solutions exist in the integers iff `g = gcd(m, n)` divides `x`; they form
/// one progression `a = a0 + t m/g`, so the box holds at most `g` of them.
pub fn count_linear_solutions(m: u64, n: u64, x: i64) -> u64 {
    assert!(m >= 1 && n >= 1, "m and n must be positive");
    let (m, n, x) = (m as i128, n as i128, x as i128);
    let g = m.gcd(&n);
    if x % g != 0 {
        return 0;
    }
    let (mg, ng, xg) = (m / g, n / g, x / g);
    // a * ng = xg (mod mg)
    let a0 = if mg == 1 {
        0
    } else {
        let inv = arith::mod_inverse(&BigInt::from(ng), &BigInt::from(mg))
            .expect("n/g and m/g are coprime");
        let inv: i128 = inv.try_into().expect("small modulus");
        (xg.rem_euclid(mg) * inv).rem_euclid(mg)
    };
    let mut count = 0;
    let mut a = if a0 == 0 { mg } else { a0 };
    while a <= m {
        let num = a * n - x;
        if num % m == 0 {
            let b = num / m;
            if (1..=n).contains(&b) {
                count += 1;
            }
        }
        a += mg;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::dirichlet::enumerate_z_n;

    #[test]
    fn overlap_examples() {
        let p = PlaceSet::new(&[2]).unwrap();
        let psi = PsiFunction::scaled_cap(rat(1, 2)).unwrap();
        let d = |q: Rational| p.decompose(&q).unwrap();
        assert_eq!(overlap_measure(&d(int(2)), &d(int(3)), &psi, &p).unwrap(), int(0));
        let three = super::super::approx_set::build_approx_set(&d(int(3)), &psi, &p).unwrap();
        assert_eq!(
            overlap_measure(&d(int(3)), &d(int(3)), &psi, &p).unwrap(),
            three.exact_measure().clone()
        );
    }

    #[test]
    fn unit_pair_beats_the_lemma() {
        // beta = 4, gamma = 8: both sets contain a neighbourhood of the origin
        let p = PlaceSet::new(&[2]).unwrap();
        let psi = PsiFunction::scaled_cap(rat(1, 2)).unwrap();
        let d = |q: Rational| p.decompose(&q).unwrap();
        let ov = overlap_measure(&d(int(4)), &d(int(8)), &psi, &p).unwrap();
        assert_eq!(ov, rat(1, 256));
        assert_eq!(lemma5_bound(&rat(1, 8), &rat(1, 16), &p), rat(1, 1024));
    }

    fn fast_matches_pairs(places: &PlaceSet, level: u64) {
        let psi = PsiFunction::scaled_cap(rat(1, 2)).unwrap();
        let sets: Vec<_> = enumerate_z_n(places, level)
            .unwrap()
            .into_iter()
            .filter(|g| g.is_positive())
            .map(|g| super::super::approx_set::build_approx_set(&g, &psi, places).unwrap())
            .collect();
        for a in &sets {
            for b in &sets {
                assert_eq!(
                    overlap_of_sets(a, b),
                    overlap_by_box_pairs(a, b),
                    "beta={} gamma={}",
                    a.gamma(),
                    b.gamma()
                );
            }
        }
    }

    #[test]
    fn fast_route_agrees_with_box_pairs() {
        fast_matches_pairs(&PlaceSet::new(&[2]).unwrap(), 6);
        fast_matches_pairs(&PlaceSet::new(&[3]).unwrap(), 5);
        fast_matches_pairs(&PlaceSet::new(&[2, 3]).unwrap(), 3);
    }

    #[test]
    fn fast_route_with_unequal_psi() {
        let p = PlaceSet::new(&[2]).unwrap();
        let psi = PsiFunction::power(int(1), 2).unwrap();
        for (x, y) in [(int(3), int(5)), (rat(5, 2), int(7)), (int(9), rat(3, 4))] {
            let a = super::super::approx_set::build_approx_set(&p.decompose(&x).unwrap(), &psi, &p).unwrap();
            let b = super::super::approx_set::build_approx_set(&p.decompose(&y).unwrap(), &psi, &p).unwrap();
            assert_eq!(overlap_of_sets(&a, &b), overlap_by_box_pairs(&a, &b));
        }
    }

    #[test]
    fn window_count_example() {
        // 3a - 2b over a <= 2, b <= 3: 1, -1, -3, 4, 2, 0
        assert_eq!(count_window_pairs(2, 3, &int(1), &[]), 3);
        assert_eq!(count_window_pairs(3, 3, &rat(1, 2), &[]), 3);
        assert_eq!(count_window_pairs(4, 6, &rat(1, 2), &[]), 2);
    }

    #[test]
    fn linear_solution_examples() {
        assert_eq!(count_linear_solutions(2, 3, 1), 1);
        assert_eq!(count_linear_solutions(5, 7, 0), 1);
        assert_eq!(count_linear_solutions(4, 6, 3), 0);
        for m in 1..=12u64 {
            for n in 1..=12u64 {
                let mn = (m * n) as i64;
                for x in -mn..=mn {
                    let brute = (1..=m)
                        .flat_map(|a| (1..=n).map(move |b| (a, b)))
                        .filter(|&(a, b)| (a * n) as i64 - (b * m) as i64 == x)
                        .count() as u64;
                    assert_eq!(count_linear_solutions(m, n, x), brute, "{m} {n} {x}");
                }
            }
        }
    }

    #[test]
    fn geometry_tau_sandwich() {
        let p = PlaceSet::new(&[2, 3]).unwrap();
        let psi = PsiFunction::scaled_cap(rat(1, 2)).unwrap();
        let d = |q: Rational| p.decompose(&q).unwrap();
        let g = OverlapGeometry::from_psi(&d(rat(5, 2)), &d(int(6)), &psi, &p).unwrap();
        for ((&pr, t), big) in p.primes().iter().zip(&g.tau).zip(&g.big_delta_p) {
            assert!(arith::pow(pr, -t) <= *big && *big < arith::pow(pr, 1 - t));
        }
        assert!(g.big_delta_inf >= g.small_delta_inf);
        let c = overlap_count_n(&g, &p);
        assert!(c.tau_bound <= c.bound);
    }
}
