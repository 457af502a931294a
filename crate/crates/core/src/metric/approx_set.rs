//! The sets `A_gamma(psi)` of points `z` in `Z_P` with `d(gamma z, beta) < psi(gamma)`
//! for some `beta` coprime to `gamma`.
//!
//! With `gamma = n p_1^nu_1 ... p_r^nu_r > 0` the set is the union, over
//! `1 <= a <= n` with `gcd(a, n) = 1`, of the boxes
//! `B_inf(a/n, psi / |gamma|_inf) x prod B_pi(a/n, p_i^nu_i psi)`, all strict.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::geometry::{self, AdelicPoint, ApproxBox, Openness};
use crate::places::{gcd_pz, PlaceSet, PzElement};

use super::psi::PsiFunction;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxSet {
    places: PlaceSet,
    gamma: PzElement,
    unit: u64,
    psi_value: Rational,
    real_radius: Rational,
    ball_radii: Vec<Rational>,
    /// `e_i` with ball measure `p_i^e_i`
    ball_exponents: Vec<i64>,
    box_count: u64,
    exact_measure: Rational,
}

/// Builds `A_gamma(psi)`. A zero `psi(gamma)` gives the empty set.
pub fn build_approx_set(gamma: &PzElement, psi: &PsiFunction, places: &PlaceSet) -> Result<ApproxSet> {
    let value = psi.eval(gamma, places)?;
    ApproxSet::with_psi_value(gamma, value, places)
}

impl ApproxSet {
    pub fn with_psi_value(gamma: &PzElement, psi_value: Rational, places: &PlaceSet) -> Result<Self> {
        if !gamma.is_positive() {
            return Err(Error::NotPositive("gamma"));
        }
        if psi_value.is_negative() {
            return Err(Error::InvalidPsi("negative psi value".into()));
        }
        let unit = gamma.unit_u64()?;
        let real_radius = &psi_value / gamma.value();
        let ball_radii: Vec<Rational> = places
            .primes()
            .iter()
            .zip(gamma.exponents())
            .map(|(&p, &nu)| arith::pow(p, nu) * &psi_value)
            .collect();

        if psi_value.is_zero() {
            return Ok(Self {
                places: places.clone(),
                gamma: gamma.clone(),
                unit,
                psi_value,
                real_radius,
                ball_exponents: vec![0; places.r()],
                ball_radii,
                box_count: 0,
                exact_measure: Rational::zero(),
            });
        }

        // Neighbouring centres are 1/n apart, so the boxes are pairwise
        // disjoint exactly when 2 * real_radius <= 1/n.
        if &real_radius * Rational::from_integer((2 * unit).into()) > Rational::one() {
            return Err(Error::Invariant(format!(
                "boxes of A_{gamma} overlap: psi exceeds the cap"
            )));
        }
        if ball_radii.iter().any(|r| r >= &Rational::one()) {
            return Err(Error::Invariant(format!(
                "a ball of A_{gamma} is not contained in Z_p"
            )));
        }
        let ball_exponents: Vec<i64> = places
            .primes()
            .iter()
            .zip(&ball_radii)
            .map(|(&p, r)| {
                geometry::PadicBall::new(p, Rational::zero(), r.clone(), Openness::Strict)
                    .map(|b| b.measure_exponent())
            })
            .collect::<Result<_>>()?;
        let box_count = arith::totient(unit);
        let one_box = places
            .primes()
            .iter()
            .zip(&ball_exponents)
            .fold(&real_radius * Rational::from_integer(2.into()), |acc, (&p, &e)| {
                acc * arith::pow(p, e)
            });
        let exact_measure = one_box * Rational::from_integer(box_count.into());
        Ok(Self {
            places: places.clone(),
            gamma: gamma.clone(),
            unit,
            psi_value,
            real_radius,
            ball_radii,
            ball_exponents,
            box_count,
            exact_measure,
        })
    }

    pub fn gamma(&self) -> &PzElement {
        &self.gamma
    }

    pub fn places(&self) -> &PlaceSet {
        &self.places
    }

    /// The unit part `n` of `gamma`.
    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn psi_value(&self) -> &Rational {
        &self.psi_value
    }

    /// `psi(gamma) / |gamma|_inf`
    pub fn real_radius(&self) -> &Rational {
        &self.real_radius
    }

    /// `p_i^nu_i psi(gamma)`, one per finite prime.
    pub fn ball_radii(&self) -> &[Rational] {
        &self.ball_radii
    }

    pub fn ball_exponents(&self) -> &[i64] {
        &self.ball_exponents
    }

    /// `phi(n)`, or 0 for the empty set.
    pub fn box_count(&self) -> u64 {
        self.box_count
    }

    pub fn is_empty(&self) -> bool {
        self.box_count == 0
    }

    pub fn exact_measure(&self) -> &Rational {
        &self.exact_measure
    }

    fn make_box(&self, a: u64) -> ApproxBox {
        let center = Rational::new(BigInt::from(a), BigInt::from(self.unit));
        let balls = self
            .ball_radii
            .iter()
            .map(|r| (center.clone(), r.clone()))
            .collect();
        ApproxBox::new(
            &self.places,
            center,
            self.real_radius.clone(),
            balls,
            Openness::Strict,
        )
        .expect("radii are positive")
    }

    /// The `phi(n)` boxes, centred at `a/n` for `1 <= a <= n`, `gcd(a, n) = 1`.
    pub fn boxes(&self) -> impl Iterator<Item = ApproxBox> + '_ {
        let n = if self.is_empty() { 0 } else { self.unit };
        (1..=n)
            .filter(move |a| arith::gcd_u64(*a, n) == 1)
            .map(move |a| self.make_box(a))
    }

    /// Box-form membership: only the box whose centre is nearest to `z_inf`
    /// (on the circle) can contain `z`.
    pub fn contains(&self, z: &AdelicPoint) -> bool {
        if self.is_empty() {
            return false;
        }
        let n = BigInt::from(self.unit);
        let base = arith::floor(&(z.real() * Rational::from_integer(n.clone())));
        [base.clone(), base + 1].into_iter().any(|b| {
            let a = b.mod_floor(&n);
            let a = if a.is_zero() { n.clone() } else { a };
            a.gcd(&n).is_one() && self.make_box(u64::try_from(&a).unwrap()).contains(z)
        })
    }

    /// `(lower, upper, ok)` with
    /// `lower = 2 phi(n) psi^(r+1) / (n p_1 ... p_r)`, `upper = 2 phi(n) psi^(r+1) / n`
    /// and `ok = lower < exact <= upper`. The empty set reports `(0, 0, true)`.
    pub fn measure_bounds(&self) -> MeasureBounds {
        if self.is_empty() {
            return MeasureBounds {
                lower: Rational::zero(),
                upper: Rational::zero(),
                exact: Rational::zero(),
                ok: true,
            };
        }
        let core = Rational::from_integer((2 * self.box_count).into())
            * num_traits::pow(self.psi_value.clone(), self.places.r() + 1)
            / Rational::from_integer(self.unit.into());
        let lower = &core / Rational::from_integer(self.places.prime_product().into());
        let ok = lower < self.exact_measure && self.exact_measure <= core;
        MeasureBounds {
            lower,
            upper: core,
            exact: self.exact_measure.clone(),
            ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureBounds {
    pub lower: Rational,
    pub upper: Rational,
    pub exact: Rational,
    pub ok: bool,
}

pub fn measure_bounds_check(set: &ApproxSet) -> MeasureBounds {
    set.measure_bounds()
}

/// Whether `z` lies in `A_gamma(psi)`, through the box form.
pub fn membership(
    z: &AdelicPoint,
    gamma: &PzElement,
    psi: &PsiFunction,
    places: &PlaceSet,
) -> Result<bool> {
    z.check(places)?;
    Ok(build_approx_set(gamma, psi, places)?.contains(z))
}

/// Whether some coprime `beta` has `d(gamma z, beta) < psi(gamma)`, found by
/// reducing `gamma z` into `Z_P`. Only the reduction's `beta` and `beta + 1`
/// can come within distance `< 1`.
pub fn membership_by_search(
    z: &AdelicPoint,
    gamma: &PzElement,
    psi_value: &Rational,
    places: &PlaceSet,
) -> Result<bool> {
    let (_, beta0) = geometry::reduce_to_fundamental_domain(&z.scale(gamma.value()), places)?;
    for shift in [0i64, 1] {
        let beta = beta0.value() + arith::int(shift);
        let beta_el = places.decompose(&beta)?;
        if gcd_pz(&beta_el, gamma)?.is_one()
            && &geometry::approximation_distance(z, gamma.value(), &beta, places)? < psi_value
        {
            return Ok(true);
        }
    }
    Ok(false)
}
