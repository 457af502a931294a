//! Partial sums of the divergence series and the second-moment lower bound.

use num_traits::Zero;

use crate::arith::{self, Rational};
use crate::dirichlet::enumerate_z_n;
use crate::error::{Error, Result};
use crate::places::{PlaceSet, PzElement};

use super::psi::PsiFunction;

/// `S(N)`, `D(N)` and `R(N) = S/D` over `{gamma > 0 : l(gamma) <= N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesPoint {
    pub level_bound: u64,
    /// `sum phi(n) psi(gamma)^(r+1) / n`
    pub s: Rational,
    /// `sum psi(gamma)^(r+1)`
    pub d: Rational,
    /// `None` when `D = 0`
    pub ratio: Option<Rational>,
}

/// Positive `gamma` with `l(gamma) <= N`, ordered by level and then by value.
pub fn level_ordered(places: &PlaceSet, level_bound: u64) -> Result<Vec<(Rational, PzElement)>> {
    let mut out: Vec<_> = enumerate_z_n(places, level_bound)?
        .into_iter()
        .filter(|g| g.is_positive())
        .map(|g| (places.level(&g), g))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.value().cmp(b.1.value())));
    Ok(out)
}

/// `(phi(n) psi^(r+1) / n, psi^(r+1))` for one index.
fn terms(gamma: &PzElement, psi: &PsiFunction, places: &PlaceSet) -> Result<(Rational, Rational)> {
    let w = psi.eval_pow(gamma, places)?;
    let n = gamma.unit_u64()?;
    let s = &w * Rational::new(arith::totient(n).into(), n.into());
    Ok((s, w))
}

/// `S(N)`, `D(N)`, `R(N)` for every `N` in `1..=n_max`.
pub fn series_table(psi: &PsiFunction, places: &PlaceSet, n_max: u64) -> Result<Vec<SeriesPoint>> {
    let elements = level_ordered(places, n_max)?;
    let mut s = Rational::zero();
    let mut d = Rational::zero();
    let mut out = Vec::with_capacity(n_max as usize);
    let mut it = elements.iter().peekable();
    for bound in 1..=n_max {
        let cap = Rational::from_integer(bound.into());
        while let Some((level, gamma)) = it.next_if(|(l, _)| *l <= cap) {
            debug_assert!(*level <= cap);
            let (ts, td) = terms(gamma, psi, places)?;
            s += ts;
            d += td;
        }
        out.push(SeriesPoint {
            level_bound: bound,
            ratio: (!d.is_zero()).then(|| &s / &d),
            s: s.clone(),
            d: d.clone(),
        });
    }
    Ok(out)
}

pub fn series_partial(psi: &PsiFunction, places: &PlaceSet, level_bound: u64) -> Result<SeriesPoint> {
    if level_bound < 1 {
        return Err(Error::InvalidLevelBound);
    }
    Ok(series_table(psi, places, level_bound)?
        .pop()
        .expect("table has level_bound rows"))
}

/// `(sum lambda_i)^2 / sum_{i,j} lambda(E_i ∩ E_j)`.
pub fn second_moment_bound(measures: &[Rational], pairwise: &[Vec<Rational>]) -> Result<Rational> {
    let k = measures.len();
    if pairwise.len() != k || pairwise.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidOverlapMatrix(format!("expected a {k}x{k} matrix")));
    }
    for i in 0..k {
        if pairwise[i][i] != measures[i] {
            return Err(Error::InvalidOverlapMatrix(format!(
                "diagonal entry {i} differs from the measure"
            )));
        }
        for j in 0..k {
            if pairwise[i][j] < Rational::zero() {
                return Err(Error::InvalidOverlapMatrix(format!("entry ({i},{j}) is negative")));
            }
            if pairwise[i][j] != pairwise[j][i] {
                return Err(Error::InvalidOverlapMatrix(format!("entry ({i},{j}) breaks symmetry")));
            }
        }
    }
    let total: Rational = pairwise.iter().flatten().fold(Rational::zero(), |a, v| a + v);
    if total.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let sum = measures.iter().fold(Rational::zero(), |a, v| a + v);
    Ok(&sum * &sum / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn series_examples() {
        let p = PlaceSet::new(&[2]).unwrap();
        let psi = PsiFunction::scaled_cap(rat(1, 2)).unwrap();
        let two = series_partial(&psi, &p, 2).unwrap();
        assert_eq!(two.s, rat(5, 12));
        assert_eq!(two.d, rat(7, 16));
        assert_eq!(two.ratio, Some(rat(20, 21)));
        let one = series_partial(&psi, &p, 1).unwrap();
        assert_eq!(one.s, rat(1, 4));
        assert!(series_partial(&psi, &p, 0).is_err());
    }

    #[test]
    fn level_order_breaks_ties_by_value() {
        let p = PlaceSet::new(&[2]).unwrap();
        let v: Vec<_> = level_ordered(&p, 2).unwrap().into_iter().map(|(_, g)| g.value().clone()).collect();
        assert_eq!(v, vec![int(1), rat(1, 2), rat(3, 2), int(2)]);
    }

    #[test]
    fn table_is_monotone() {
        let p = PlaceSet::new(&[2, 3]).unwrap();
        let psi = PsiFunction::power(int(1), 1).unwrap();
        let t = series_table(&psi, &p, 12).unwrap();
        for w in t.windows(2) {
            assert!(w[0].s <= w[1].s && w[0].d <= w[1].d);
        }
    }

    #[test]
    fn zero_psi_has_no_ratio() {
        let p = PlaceSet::new(&[2]).unwrap();
        let psi = PsiFunction::scaled_cap(int(0)).unwrap();
        assert_eq!(series_partial(&psi, &p, 3).unwrap().ratio, None);
    }

    #[test]
    fn second_moment_examples() {
        let m = rat(1, 7);
        assert_eq!(second_moment_bound(std::slice::from_ref(&m), &[vec![m.clone()]]).unwrap(), m);
        let z = int(0);
        let disjoint = vec![vec![m.clone(), z.clone()], vec![z.clone(), m.clone()]];
        assert_eq!(second_moment_bound(&[m.clone(), m.clone()], &disjoint).unwrap(), rat(2, 7));
        let same = vec![vec![m.clone(); 2]; 2];
        assert_eq!(second_moment_bound(&[m.clone(), m.clone()], &same).unwrap(), m);
        assert!(matches!(
            second_moment_bound(std::slice::from_ref(&z), &[vec![z.clone()]]),
            Err(Error::ZeroDenominator)
        ));
        let lopsided = vec![vec![m.clone(), z.clone()], vec![rat(1, 9), m.clone()]];
        assert!(second_moment_bound(&[m.clone(), m.clone()], &lopsided).is_err());
    }
}
