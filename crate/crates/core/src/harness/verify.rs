//! The invariant suite behind `verify`, scaled by the experiment config.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{self, Rational};
use crate::dirichlet::{coprime_approximants, dirichlet_approximate, enumerate_z_n, LevelBallIndex};
use crate::error::Result;
use crate::geometry::{self, AdelicPoint, FundamentalDomainPoint};
use crate::metric::{
    self, build_approx_set, count_linear_solutions, lemma5_bound, membership_by_search,
    overlap_count_n, overlap_of_sets, series_table, ApproxSet, OverlapGeometry, PsiFunction,
};
use crate::places::PlaceSet;

use super::config::ExperimentConfig;
use super::montecarlo::{chunk_samples, required_digits};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    pub passed: bool,
    /// First failing case, if any.
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            passed: true,
            detail: String::new(),
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures == 0 {
                self.detail = detail();
            }
            self.failures += 1;
            self.passed = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

/// A point with coordinates `a/b`, `1 <= b <= max_den`, `|a| <= 2b`.
pub fn random_rational_point(rng: &mut impl Rng, places: &PlaceSet, max_den: i64) -> AdelicPoint {
    AdelicPoint::new(
        (0..places.len())
            .map(|_| {
                let d = rng.random_range(1..=max_den);
                arith::rat(rng.random_range(-2 * d..=2 * d), d)
            })
            .collect(),
    )
}

/// Like [`random_rational_point`] but with at least two distinct coordinates.
pub fn random_offdiagonal_point(rng: &mut impl Rng, places: &PlaceSet, max_den: i64) -> AdelicPoint {
    loop {
        let x = random_rational_point(rng, places, max_den);
        if !x.is_diagonal() {
            return x;
        }
    }
}

/// Positive `gamma` with `l(gamma) <= level` and their sets.
pub fn family(places: &PlaceSet, psi: &PsiFunction, level: u64) -> Result<Vec<ApproxSet>> {
    enumerate_z_n(places, level)?
        .into_iter()
        .filter(|g| g.is_positive())
        .map(|g| build_approx_set(&g, psi, places))
        .collect()
}

pub fn check_z_n_count(places: &PlaceSet, n_max: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("z_n_count");
    for n in 1..=n_max {
        let idx = LevelBallIndex::new(places, n)?;
        let len = enumerate_z_n(places, n)?.len();
        let formula = idx.z_n_count(places);
        c.record(formula == len.into(), || format!("N={n}: {len} vs {formula}"));
    }
    Ok(c)
}

pub fn check_dirichlet(places: &PlaceSet, n_max: u64, points: usize, seed: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("dirichlet_bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Rational::from_integer(places.max_prime().into());
    for _ in 0..points {
        let x = random_rational_point(&mut rng, places, 1000);
        let mut n = 1;
        while n <= n_max {
            let res = dirichlet_approximate(&x, n, places)?;
            let bound = &m / Rational::from_integer(n.into());
            let d = geometry::approximation_distance(&x, res.gamma.value(), res.beta.value(), places)?;
            let ok = res.gamma.is_positive()
                && places.level(&res.gamma) <= Rational::from_integer(n.into())
                && d <= bound;
            c.record(ok, || format!("x={x:?} N={n}"));
            n *= 2;
        }
    }
    Ok(c)
}

pub fn check_coprime(places: &PlaceSet, points: usize, count: usize, seed: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("coprime_approximants");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let m = Rational::from_integer(places.max_prime().into());
    for _ in 0..points {
        let x = random_offdiagonal_point(&mut rng, places, 1000);
        match coprime_approximants(&x, count, 4096, places) {
            Ok(pairs) => {
                let distinct = pairs
                    .iter()
                    .map(|p| (p.beta.value(), p.gamma.value()))
                    .collect::<std::collections::HashSet<_>>()
                    .len();
                let ok = pairs.len() == count
                    && distinct == count
                    && pairs.iter().all(|p| {
                        p.gamma.is_positive()
                            && crate::places::gcd_pz(&p.beta, &p.gamma).map(|g| g.is_one()).unwrap_or(false)
                            && p.distance <= &m / places.level(&p.gamma)
                    });
                c.record(ok, || format!("x={x:?}"));
            }
            Err(e) => c.record(false, || format!("x={x:?}: {e}")),
        }
    }
    Ok(c)
}

pub fn check_measure_bounds(sets: &[ApproxSet]) -> CheckResult {
    let mut c = CheckResult::new("measure_bracketing");
    for s in sets {
        let mb = s.measure_bounds();
        c.record(mb.ok, || {
            format!(
                "gamma={}: {} not in ({}, {}]",
                s.gamma(),
                arith::format_rational(&mb.exact),
                arith::format_rational(&mb.lower),
                arith::format_rational(&mb.upper)
            )
        });
    }
    c
}

pub fn check_box_disjointness(sets: &[ApproxSet]) -> CheckResult {
    let mut c = CheckResult::new("box_disjointness");
    for s in sets {
        let boxes: Vec<_> = s.boxes().collect();
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                let v = boxes[i].intersection_measure(&boxes[j]);
                c.record(v.is_zero(), || format!("gamma={} boxes {i},{j}", s.gamma()));
            }
        }
        let sum = boxes.iter().fold(Rational::zero(), |a, b| a + b.measure());
        c.record(&sum == s.exact_measure(), || format!("gamma={} box sum", s.gamma()));
    }
    c
}

/// The overlap bound and the count of `N(beta, gamma)` over all pairs `beta != gamma`.
pub fn check_overlaps(sets: &[ApproxSet], places: &PlaceSet) -> Result<(CheckResult, CheckResult)> {
    let mut lemma = CheckResult::new("overlap_lemma");
    let mut count = CheckResult::new("overlap_count");
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            let ov = overlap_of_sets(a, b);
            let bound = lemma5_bound(a.psi_value(), b.psi_value(), places);
            lemma.record(ov <= bound, || {
                format!(
                    "beta={} gamma={}: {} > {}",
                    a.gamma(),
                    b.gamma(),
                    arith::format_rational(&ov),
                    arith::format_rational(&bound)
                )
            });
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let g = OverlapGeometry::new(a.gamma(), b.gamma(), a.psi_value(), b.psi_value(), places)?;
            let oc = overlap_count_n(&g, places);
            count.record(oc.within_bound, || {
                format!(
                    "beta={} gamma={}: count {} > {}",
                    a.gamma(),
                    b.gamma(),
                    oc.count,
                    arith::format_rational(&oc.bound)
                )
            });
        }
    }
    Ok((lemma, count))
}

/// `a n - b m = x` is solvable in the integers iff some `a` in `[0, m)` has
/// `m | a n - x`.
pub fn integer_solvable(m: u64, n: u64, x: i64) -> bool {
    let (m, n, x) = (m as i128, n as i128, x as i128);
    (0..m).any(|a| (a * n - x).rem_euclid(m) == 0)
}

/// Solvability in the integers iff `gcd(m, n) | x`; inside the box the count
/// is 0 when `gcd(m, n)` does not divide `x` and never exceeds `gcd(m, n)`.
pub fn check_linear_solutions(limit: u64) -> CheckResult {
    let mut c = CheckResult::new("linear_solutions");
    for m in 1..=limit {
        for n in 1..=limit {
            let g = num_integer::gcd(m, n) as i64;
            let mn = (m * n) as i64;
            for x in -mn..=mn {
                let k = count_linear_solutions(m, n, x);
                let divides = x % g == 0;
                let ok = integer_solvable(m, n, x) == divides && (divides || k == 0) && k <= g as u64;
                c.record(ok, || format!("m={m} n={n} x={x}: {k}"));
            }
        }
    }
    c
}

pub fn check_series(psi: &PsiFunction, places: &PlaceSet, n_max: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("series_monotone");
    let t = series_table(psi, places, n_max)?;
    for w in t.windows(2) {
        c.record(w[0].s <= w[1].s && w[0].d <= w[1].d, || format!("N={}", w[1].level_bound));
    }
    Ok(c)
}

pub fn check_membership(sets: &[ApproxSet], places: &PlaceSet, samples: u64, seed: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("membership_consistency");
    let digits = required_digits(sets, places)?;
    for s in chunk_samples(places, digits, seed, 0, samples)? {
        let z = s.to_point();
        for a in sets {
            let inside = a.boxes().filter(|b| b.contains(&z)).count();
            let by_box = a.contains(&z);
            let by_search = membership_by_search(&z, a.gamma(), a.psi_value(), places)?;
            c.record(inside <= 1 && by_box == (inside == 1) && by_box == by_search, || {
                format!("gamma={} z={z:?}", a.gamma())
            });
        }
    }
    Ok(c)
}

pub fn check_reduction(places: &PlaceSet, points: usize, shifts: usize, seed: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("reduction");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5151);
    let lattice = enumerate_z_n(places, 8)?;
    for i in 0..points {
        let x = random_rational_point(&mut rng, places, 1000);
        let (z, _) = geometry::reduce_to_fundamental_domain(&x, places)?;
        let (zz, g) = geometry::reduce_to_fundamental_domain(z.point(), places)?;
        c.record(zz == z && g.is_zero(), || format!("idempotence x={x:?}"));
        if i < shifts {
            for _ in 0..shifts {
                let k = &lattice[rng.random_range(0..lattice.len())];
                let sign = if rng.random::<bool>() { 1 } else { -1 };
                let q = k.value() * Rational::from_integer(sign.into());
                let (zs, _) = geometry::reduce_to_fundamental_domain(&x.shift(&q), places)?;
                c.record(zs == z, || format!("lattice x={x:?} shift={q}"));
            }
        }
    }
    Ok(c)
}

pub fn check_transfer(places: &PlaceSet, points: usize, seed: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("transfer_map");
    let pi = places.prime_product();
    let q = (pi + 1..).find(|&q| arith::is_prime(q)).expect("primes are unbounded");
    let origin = FundamentalDomainPoint::origin(places);
    c.record(metric::transfer_map(&origin, q, 0, places)? == origin, || "T(0) != 0".into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7777);
    for _ in 0..points {
        let x = random_rational_point(&mut rng, places, 1000);
        let (z, _) = geometry::reduce_to_fundamental_domain(&x, places)?;
        let s = rng.random_range(-20..=20);
        let t = metric::transfer_map(&z, q, s, places)?;
        c.record(FundamentalDomainPoint::new(t.point().clone(), places).is_ok(), || {
            format!("x={x:?} s={s}")
        });
    }
    Ok(c)
}

/// Runs every check at the scale given by `cfg`.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerifySummary> {
    let places = cfg.place_set()?;
    let psi = cfg.psi_function(&places)?;
    let sets = family(&places, &psi, cfg.n_max)?;
    let small = family(&places, &psi, cfg.overlap_level())?;
    let (lemma, count) = check_overlaps(&small, &places)?;
    let checks = vec![
        check_z_n_count(&places, cfg.n_max)?,
        check_dirichlet(&places, cfg.n_max, 20, cfg.seed)?,
        check_coprime(&places, 5, 5, cfg.seed)?,
        check_measure_bounds(&sets),
        check_box_disjointness(&small),
        lemma,
        count,
        check_linear_solutions(30),
        check_series(&psi, &places, cfg.n_max)?,
        check_membership(&small, &places, 500, cfg.seed)?,
        check_reduction(&places, 1000, 10, cfg.seed)?,
        check_transfer(&places, 200, cfg.seed)?,
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerifySummary { checks, all_passed })
}
