use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::places::{PlaceSet, PzElement};

/// `1 / (2 L(gamma))`, the largest admissible value of `psi(gamma)`.
pub fn psi_cap(gamma: &PzElement, places: &PlaceSet) -> Result<Rational> {
    let l = places.big_l(gamma)?;
    Ok((Rational::from_integer(2.into()) * l).recip())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsiFamily {
    /// `psi(gamma) = c / L(gamma)` with `0 <= c <= 1/2`.
    ScaledCap { c: Rational },
    /// `psi(gamma) = min(c / L(gamma)^theta, 1 / (2 L(gamma)))`.
    Power { c: Rational, theta: u32 },
    /// Explicit values keyed by `gamma`; zero off the table.
    Table(BTreeMap<Rational, Rational>),
}

/// An approximation function `psi : P^-1 Z -> Q_{>=0}` that never exceeds the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiFunction {
    family: PsiFamily,
}

impl PsiFunction {
    pub fn scaled_cap(c: Rational) -> Result<Self> {
        if c.is_negative() || c > Rational::new(1.into(), 2.into()) {
            return Err(Error::InvalidPsi(format!(
                "scaled_cap needs 0 <= c <= 1/2, got {}",
                arith::format_rational(&c)
            )));
        }
        Ok(Self {
            family: PsiFamily::ScaledCap { c },
        })
    }

    pub fn power(c: Rational, theta: u32) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::InvalidPsi("power needs c >= 0".into()));
        }
        if theta < 1 {
            return Err(Error::InvalidPsi("power needs an integer theta >= 1".into()));
        }
        Ok(Self {
            family: PsiFamily::Power { c, theta },
        })
    }

    /// Every entry is checked against the cap here, so evaluation never fails on it.
    pub fn table(
        entries: impl IntoIterator<Item = (Rational, Rational)>,
        places: &PlaceSet,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (gamma, value) in entries {
            let element = places.decompose(&gamma)?;
            if element.is_zero() {
                return Err(Error::InvalidPsi("psi table has an entry for 0".into()));
            }
            if value.is_negative() {
                return Err(Error::InvalidPsi(format!(
                    "negative psi value at {}",
                    arith::format_rational(&gamma)
                )));
            }
            let cap = psi_cap(&element, places)?;
            if value > cap {
                return Err(Error::CapViolation {
                    gamma: arith::format_rational(&gamma),
                    value: arith::format_rational(&value),
                    cap: arith::format_rational(&cap),
                });
            }
            map.insert(gamma, value);
        }
        Ok(Self {
            family: PsiFamily::Table(map),
        })
    }

    pub fn family(&self) -> &PsiFamily {
        &self.family
    }

    pub fn eval(&self, gamma: &PzElement, places: &PlaceSet) -> Result<Rational> {
        if gamma.is_zero() {
            return Err(Error::ZeroArgument("gamma"));
        }
        match &self.family {
            PsiFamily::ScaledCap { c } => Ok(c / places.big_l(gamma)?),
            PsiFamily::Power { c, theta } => {
                let l = places.big_l(gamma)?;
                let raw = c / num_traits::pow(l.clone(), *theta as usize);
                let cap = (Rational::from_integer(2.into()) * l).recip();
                Ok(raw.min(cap))
            }
            PsiFamily::Table(map) => Ok(map.get(gamma.value()).cloned().unwrap_or_else(Rational::zero)),
        }
    }

    /// `psi(gamma)^(r+1)`
    pub fn eval_pow(&self, gamma: &PzElement, places: &PlaceSet) -> Result<Rational> {
        Ok(num_traits::pow(self.eval(gamma, places)?, places.r() + 1))
    }
}

impl fmt::Display for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            PsiFamily::ScaledCap { c } => write!(f, "scaled_cap(c={})", arith::format_rational(c)),
            PsiFamily::Power { c, theta } => {
                write!(f, "power(c={}, theta={theta})", arith::format_rational(c))
            }
            PsiFamily::Table(map) => write!(f, "table({} entries)", map.len()),
        }
    }
}

impl Default for PsiFunction {
    fn default() -> Self {
        Self {
            family: PsiFamily::ScaledCap {
                c: Rational::new(One::one(), 2.into()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn eval_examples() {
        let p2 = PlaceSet::new(&[2]).unwrap();
        let d = |q: Rational| p2.decompose(&q).unwrap();
        let half = PsiFunction::scaled_cap(rat(1, 2)).unwrap();
        assert_eq!(half.eval(&d(int(3)), &p2).unwrap(), rat(1, 6));
        let pow = PsiFunction::power(int(1), 2).unwrap();
        assert_eq!(pow.eval(&d(int(12)), &p2).unwrap(), rat(1, 144));
        for f in [&half, &pow] {
            assert!(f.eval(&d(int(1)), &p2).unwrap() <= rat(1, 2));
        }
        // c / L^theta above the cap is clamped
        let big = PsiFunction::power(int(5), 1).unwrap();
        assert_eq!(big.eval(&d(int(3)), &p2).unwrap(), rat(1, 6));
    }

    #[test]
    fn invalid_parameters() {
        assert!(PsiFunction::scaled_cap(rat(3, 4)).is_err());
        assert!(PsiFunction::scaled_cap(rat(-1, 4)).is_err());
        assert!(PsiFunction::power(int(1), 0).is_err());
    }

    #[test]
    fn table_cap_is_enforced() {
        let p2 = PlaceSet::new(&[2]).unwrap();
        let ok = PsiFunction::table([(int(3), rat(1, 6)), (rat(1, 2), rat(1, 8))], &p2).unwrap();
        assert_eq!(ok.eval(&p2.decompose(&int(3)).unwrap(), &p2).unwrap(), rat(1, 6));
        assert_eq!(ok.eval(&p2.decompose(&int(5)).unwrap(), &p2).unwrap(), int(0));
        assert!(matches!(
            PsiFunction::table([(int(3), rat(1, 5))], &p2),
            Err(Error::CapViolation { .. })
        ));
        assert!(PsiFunction::table([(rat(1, 3), rat(1, 100))], &p2).is_err());
    }
}
