//! Points of `Q_P = R x Q_p1 x ... x Q_pr` with exact rational coordinates,
//! the sup-distance, reduction into the fundamental domain
//! `Z_P = [0,1) x Z_p1 x ... x Z_pr`, and boxes with exact Haar measures.
//!
//! A box lives in `Q_P`. What it covers in `Z_P` is its image under the
//! quotient by the diagonal lattice: the points `z` with `z + iota(k)` in the
//! box for some integer `k`. When the real radius is at most 1/2 and every
//! ball sits inside `Z_p`, that image is a faithful copy of the box (same
//! measure), and it wraps around `0 == 1` on the real side while shifting the
//! p-adic centres by the same integer. All boxes built from approximation
//! sets satisfy both conditions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::places::{PlaceSet, PzElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Openness {
    /// `|x - c| < radius`
    Strict,
    /// `|x - c| <= radius`
    Weak,
}

/// A point of `Q_P`: coordinate 0 is real, coordinate `i` lives in `Q_{p_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdelicPoint {
    coords: Vec<Rational>,
}

impl AdelicPoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self { coords }
    }

    /// The diagonal embedding `iota(q) = (q, q, ..., q)`.
    pub fn diagonal(q: &Rational, places: &PlaceSet) -> Self {
        Self {
            coords: vec![q.clone(); places.len()],
        }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn real(&self) -> &Rational {
        &self.coords[0]
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    /// `self + iota(q)`
    pub fn shift(&self, q: &Rational) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c + q).collect(),
        }
    }

    /// True when every coordinate is the same rational, i.e. the point lies in `iota(Q)`.
    pub fn is_diagonal(&self) -> bool {
        self.coords.windows(2).all(|w| w[0] == w[1])
    }

    pub(crate) fn check(&self, places: &PlaceSet) -> Result<()> {
        if self.coords.len() != places.len() {
            return Err(Error::MismatchedPlaces {
                expected: places.len(),
                found: self.coords.len(),
            });
        }
        Ok(())
    }
}

/// `d(x, y) = max_v |x_v - y_v|_v`.
pub fn distance(x: &AdelicPoint, y: &AdelicPoint, places: &PlaceSet) -> Result<Rational> {
    x.check(places)?;
    y.check(places)?;
    Ok(place_abs_diffs(x, y, places)
        .max()
        .expect("place set is never empty"))
}

/// `d(gamma * x, iota(beta))`
pub fn approximation_distance(
    x: &AdelicPoint,
    gamma: &Rational,
    beta: &Rational,
    places: &PlaceSet,
) -> Result<Rational> {
    distance(&x.scale(gamma), &AdelicPoint::diagonal(beta, places), places)
}

fn place_abs_diffs<'a>(
    x: &'a AdelicPoint,
    y: &'a AdelicPoint,
    places: &'a PlaceSet,
) -> impl Iterator<Item = Rational> + 'a {
    x.coords
        .iter()
        .zip(&y.coords)
        .enumerate()
        .map(move |(i, (a, b))| {
            let diff = a - b;
            if i == 0 {
                diff.abs()
            } else {
                arith::padic_abs(&diff, places.primes()[i - 1])
            }
        })
}

/// A point of `Z_P`: real coordinate in `[0, 1)`, p-adic coordinates p-integral.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FundamentalDomainPoint(AdelicPoint);

impl FundamentalDomainPoint {
    pub fn new(point: AdelicPoint, places: &PlaceSet) -> Result<Self> {
        point.check(places)?;
        let real = point.real();
        if real.is_negative() || real >= &Rational::one() {
            return Err(Error::Invariant(format!(
                "real coordinate {} outside [0, 1)",
                arith::format_rational(real)
            )));
        }
        for (c, &p) in point.coords[1..].iter().zip(places.primes()) {
            if !c.is_zero() && arith::padic_valuation(c, p)? < 0 {
                return Err(Error::Invariant(format!(
                    "coordinate {} is not {p}-integral",
                    arith::format_rational(c)
                )));
            }
        }
        Ok(Self(point))
    }

    pub fn origin(places: &PlaceSet) -> Self {
        Self(AdelicPoint::diagonal(&Rational::zero(), places))
    }

    pub fn point(&self) -> &AdelicPoint {
        &self.0
    }

    pub fn into_point(self) -> AdelicPoint {
        self.0
    }
}

impl AsRef<AdelicPoint> for FundamentalDomainPoint {
    fn as_ref(&self) -> &AdelicPoint {
        &self.0
    }
}

/// The p-principal part of `q`: the unique `a / p^k` with `0 <= a < p^k` and
/// `q - a / p^k` p-integral. Zero when `q` is already p-integral.
pub fn principal_part(q: &Rational, p: u64) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let v = arith::padic_valuation(q, p).expect("nonzero");
    if v >= 0 {
        return Rational::zero();
    }
    let pk = num_traits::pow(BigInt::from(p), (-v) as usize);
    let rest = q.denom() / &pk;
    let inv = arith::mod_inverse(&rest, &pk).expect("rest is a p-unit");
    let a = (q.numer() * inv).mod_floor(&pk);
    Rational::new(a, pk)
}

/// Splits `x` as `z + iota(gamma)` with `z` in `Z_P` and `gamma` in `P^-1 Z`.
///
/// Subtracts the p-principal part of every p-adic coordinate, then the integer
/// floor of what is left of the real coordinate.
pub fn reduce_to_fundamental_domain(
    x: &AdelicPoint,
    places: &PlaceSet,
) -> Result<(FundamentalDomainPoint, PzElement)> {
    x.check(places)?;
    let mut gamma = Rational::zero();
    for (c, &p) in x.coords[1..].iter().zip(places.primes()) {
        gamma += principal_part(c, p);
    }
    gamma += Rational::from_integer(arith::floor(&(x.real() - &gamma)));
    let z = x.shift(&-gamma.clone());
    let element = places.decompose(&gamma)?;
    Ok((FundamentalDomainPoint::new(z, places)?, element))
}

/// A p-adic ball `{y : |y - center|_p < radius}` (or `<=`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicBall {
    p: u64,
    center: Rational,
    radius: Rational,
    openness: Openness,
}

impl PadicBall {
    pub fn new(p: u64, center: Rational, radius: Rational, openness: Openness) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::NonPositiveRadius(arith::format_rational(&radius)));
        }
        Ok(Self {
            p,
            center,
            radius,
            openness,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn openness(&self) -> Openness {
        self.openness
    }

    /// `e` with Haar measure `p^e`: the largest power of `p` below the radius
    /// (strictly below for a strict ball).
    pub fn measure_exponent(&self) -> i64 {
        let e = arith::floor_log(self.p, &self.radius);
        if self.openness == Openness::Strict && arith::pow(self.p, e) == self.radius {
            e - 1
        } else {
            e
        }
    }

    pub fn measure(&self) -> Rational {
        arith::pow(self.p, self.measure_exponent())
    }

    pub fn contains(&self, y: &Rational) -> bool {
        arith::padic_abs(&(y - &self.center), self.p) <= self.measure()
    }

    fn shifted(&self, k: &Rational) -> Self {
        Self {
            center: &self.center + k,
            ..self.clone()
        }
    }

    /// Balls are nested or disjoint, so the overlap is the smaller measure or 0.
    pub fn intersection_measure(&self, other: &PadicBall) -> Rational {
        debug_assert_eq!(self.p, other.p);
        let (a, b) = (self.measure(), other.measure());
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        if arith::padic_abs(&(&self.center - &other.center), self.p) <= large {
            small
        } else {
            Rational::zero()
        }
    }
}

/// `ball_measure` as a free function over a strict or weak radius.
pub fn ball_measure(p: u64, radius: &Rational, openness: Openness) -> Result<Rational> {
    Ok(PadicBall::new(p, Rational::zero(), radius.clone(), openness)?.measure())
}

/// One real interval times one p-adic ball per finite place.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ApproxBox {
    real_center: Rational,
    real_radius: Rational,
    balls: Vec<PadicBall>,
    openness: Openness,
}

impl ApproxBox {
    /// `balls` lists `(center, radius)` in the order of the place set's primes.
    pub fn new(
        places: &PlaceSet,
        real_center: Rational,
        real_radius: Rational,
        balls: Vec<(Rational, Rational)>,
        openness: Openness,
    ) -> Result<Self> {
        if balls.len() != places.r() {
            return Err(Error::MismatchedPlaces {
                expected: places.r(),
                found: balls.len(),
            });
        }
        if !real_radius.is_positive() {
            return Err(Error::NonPositiveRadius(arith::format_rational(&real_radius)));
        }
        let balls = places
            .primes()
            .iter()
            .zip(balls)
            .map(|(&p, (c, r))| PadicBall::new(p, c, r, openness))
            .collect::<Result<_>>()?;
        Ok(Self {
            real_center,
            real_radius,
            balls,
            openness,
        })
    }

    pub fn real_center(&self) -> &Rational {
        &self.real_center
    }

    pub fn real_radius(&self) -> &Rational {
        &self.real_radius
    }

    pub fn balls(&self) -> &[PadicBall] {
        &self.balls
    }

    pub fn openness(&self) -> Openness {
        self.openness
    }

    /// Length of the real interval on the circle, capped at 1.
    pub fn real_length(&self) -> Rational {
        std::cmp::min(&self.real_radius * Rational::from_integer(2.into()), Rational::one())
    }

    pub fn measure(&self) -> Rational {
        self.balls
            .iter()
            .fold(self.real_length(), |acc, b| acc * b.measure())
    }

    fn real_contains(&self, x: &Rational) -> bool {
        let d = (x - &self.real_center).abs();
        match self.openness {
            Openness::Strict => d < self.real_radius,
            Openness::Weak => d <= self.real_radius,
        }
    }

    /// Whether `z` (read modulo the lattice) lies in the box.
    pub fn contains(&self, z: &AdelicPoint) -> bool {
        if z.coords.len() != self.balls.len() + 1 {
            return false;
        }
        // integers k with z_inf + k inside the real interval
        let lo = arith::floor(&(&self.real_center - &self.real_radius - z.real()));
        let hi = arith::floor(&(&self.real_center + &self.real_radius - z.real())) + 1;
        let mut k = lo;
        while k <= hi {
            let shift = Rational::from_integer(k.clone());
            if self.real_contains(&(z.real() + &shift))
                && self
                    .balls
                    .iter()
                    .zip(&z.coords[1..])
                    .all(|(b, c)| b.contains(&(c + &shift)))
            {
                return true;
            }
            k += 1;
        }
        false
    }

    /// Exact measure of the overlap of the two boxes' images in `Z_P`.
    ///
    /// Sums, over integer shifts `k`, the overlap of `self` with `other + iota(k)`.
    /// Exact when both boxes embed in `Z_P` (real radius at most 1/2, ball
    /// radii at most 1), as every box of an approximation set does.
    pub fn intersection_measure(&self, other: &ApproxBox) -> Rational {
        debug_assert_eq!(self.balls.len(), other.balls.len());
        let reach = &self.real_radius + &other.real_radius;
        let offset = &self.real_center - &other.real_center;
        let lo = arith::floor(&(&offset - &reach));
        let hi = arith::floor(&(&offset + &reach)) + 1;
        let mut total = Rational::zero();
        let mut k = lo;
        while k <= hi {
            let shift = Rational::from_integer(k.clone());
            let c2 = &other.real_center + &shift;
            let left = std::cmp::max(
                &self.real_center - &self.real_radius,
                &c2 - &other.real_radius,
            );
            let right = std::cmp::min(
                &self.real_center + &self.real_radius,
                &c2 + &other.real_radius,
            );
            if right > left {
                let overlap = self
                    .balls
                    .iter()
                    .zip(&other.balls)
                    .fold(right - left, |acc, (a, b)| {
                        acc * a.intersection_measure(&b.shifted(&shift))
                    });
                total += overlap;
            }
            k += BigInt::one();
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn p2() -> PlaceSet {
        PlaceSet::new(&[2]).unwrap()
    }

    fn pt(c: &[(i64, i64)]) -> AdelicPoint {
        AdelicPoint::new(c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn distance_examples() {
        let p = p2();
        assert_eq!(distance(&pt(&[(1, 2), (1, 2)]), &pt(&[(1, 3), (1, 3)]), &p).unwrap(), int(2));
        let x = pt(&[(3, 7), (5, 9)]);
        assert_eq!(distance(&x, &x, &p).unwrap(), int(0));
        let p3 = PlaceSet::new(&[3]).unwrap();
        assert_eq!(distance(&pt(&[(0, 1), (1, 1)]), &pt(&[(0, 1), (0, 1)]), &p3).unwrap(), int(1));
        assert!(matches!(
            distance(&pt(&[(0, 1)]), &pt(&[(0, 1), (0, 1)]), &p),
            Err(Error::MismatchedPlaces { .. })
        ));
    }

    #[test]
    fn reduce_examples() {
        let p = p2();
        let (z, g) = reduce_to_fundamental_domain(&AdelicPoint::diagonal(&rat(3, 2), &p), &p).unwrap();
        assert_eq!(z.point(), &pt(&[(0, 1), (0, 1)]));
        assert_eq!(g.value(), &rat(3, 2));

        let inside = pt(&[(1, 5), (7, 3)]);
        let (z, g) = reduce_to_fundamental_domain(&inside, &p).unwrap();
        assert_eq!(z.point(), &inside);
        assert!(g.is_zero());

        let (z, g) = reduce_to_fundamental_domain(&pt(&[(7, 4), (1, 3)]), &p).unwrap();
        // z = x - iota(1) shifts the 2-adic coordinate as well
        assert_eq!(z.point(), &pt(&[(3, 4), (-2, 3)]));
        assert_eq!(g.value(), &int(1));
    }

    #[test]
    fn principal_parts() {
        assert_eq!(principal_part(&rat(3, 2), 2), rat(1, 2));
        assert_eq!(principal_part(&rat(1, 12), 2), rat(3, 4));
        assert_eq!(principal_part(&rat(-1, 9), 3), rat(8, 9));
        assert_eq!(principal_part(&rat(5, 3), 2), int(0));
    }

    #[test]
    fn ball_measure_examples() {
        assert_eq!(ball_measure(2, &rat(3, 4), Openness::Strict).unwrap(), rat(1, 2));
        assert_eq!(ball_measure(3, &rat(1, 9), Openness::Strict).unwrap(), rat(1, 27));
        assert_eq!(ball_measure(3, &rat(1, 9), Openness::Weak).unwrap(), rat(1, 9));
        assert!(matches!(
            ball_measure(3, &int(0), Openness::Strict),
            Err(Error::NonPositiveRadius(_))
        ));
    }

    #[test]
    fn box_measure_examples() {
        let p = p2();
        let b = ApproxBox::new(&p, int(0), rat(1, 18), vec![(int(0), rat(1, 6))], Openness::Strict).unwrap();
        assert_eq!(b.measure(), rat(1, 72));
        let wide = ApproxBox::new(&p, int(0), rat(3, 4), vec![(int(0), int(4))], Openness::Weak).unwrap();
        assert_eq!(wide.real_length(), int(1));
        let p23 = PlaceSet::new(&[2, 3]).unwrap();
        let b = ApproxBox::new(
            &p23,
            int(0),
            rat(1, 4),
            vec![(int(0), int(1)), (int(0), int(1))],
            Openness::Strict,
        )
        .unwrap();
        assert_eq!(b.measure(), rat(1, 12));
    }

    #[test]
    fn box_intersection_examples() {
        let p = p2();
        let b = ApproxBox::new(&p, rat(1, 3), rat(1, 18), vec![(rat(1, 3), rat(1, 6))], Openness::Strict).unwrap();
        assert_eq!(b.intersection_measure(&b), b.measure());

        let b0 = ApproxBox::new(&p, int(0), rat(1, 8), vec![(int(0), rat(1, 4))], Openness::Strict).unwrap();
        let b1 = ApproxBox::new(&p, int(0), rat(1, 8), vec![(int(1), rat(1, 4))], Openness::Strict).unwrap();
        assert_eq!(b0.intersection_measure(&b1), int(0));

        let a = ApproxBox::new(&p, int(0), rat(1, 8), vec![(int(0), rat(1, 2))], Openness::Strict).unwrap();
        let c = ApproxBox::new(&p, rat(3, 16), rat(1, 8), vec![(int(0), rat(1, 2))], Openness::Strict).unwrap();
        assert_eq!(a.intersection_measure(&c), rat(1, 16) * rat(1, 4));
    }

    #[test]
    fn wrapped_box_shifts_padic_centre() {
        // real interval (7/8, 9/8) around 1, 2-adic ball 1 + 4Z_2
        let p = p2();
        let b = ApproxBox::new(&p, int(1), rat(1, 8), vec![(int(1), rat(1, 2))], Openness::Strict).unwrap();
        assert!(b.contains(&pt(&[(15, 16), (5, 1)])));
        assert!(!b.contains(&pt(&[(15, 16), (4, 1)])));
        assert!(b.contains(&pt(&[(1, 16), (4, 1)])));
        assert!(!b.contains(&pt(&[(1, 16), (5, 1)])));
        let mirrored = ApproxBox::new(&p, int(0), rat(1, 8), vec![(int(0), rat(1, 2))], Openness::Strict).unwrap();
        assert_eq!(b.intersection_measure(&mirrored), b.measure());
    }

    #[test]
    fn box_contains_examples() {
        let p = p2();
        let b = ApproxBox::new(&p, rat(1, 3), rat(1, 18), vec![(rat(1, 3), rat(1, 6))], Openness::Strict).unwrap();
        assert!(b.contains(&pt(&[(1, 3), (1, 3)])));
        assert!(!b.contains(&pt(&[(7, 18), (1, 3)])));
        let weak = ApproxBox::new(&p, rat(1, 3), rat(1, 18), vec![(rat(1, 3), rat(1, 6))], Openness::Weak).unwrap();
        assert!(weak.contains(&pt(&[(7, 18), (1, 3)])));
    }

    #[test]
    fn fundamental_domain_validation() {
        let p = p2();
        assert!(FundamentalDomainPoint::new(pt(&[(1, 1), (0, 1)]), &p).is_err());
        assert!(FundamentalDomainPoint::new(pt(&[(1, 2), (1, 2)]), &p).is_err());
        assert!(FundamentalDomainPoint::new(pt(&[(1, 2), (1, 3)]), &p).is_ok());
    }
}
