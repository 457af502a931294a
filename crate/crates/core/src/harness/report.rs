//! Report tables and their CSV/JSON serialisation. Exact values are written as
//! `num/den` strings; Monte Carlo values as decimals with standard errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{self, Rational};
use crate::dirichlet::dirichlet_approximate;
use crate::error::{Error, Result};
use crate::geometry::AdelicPoint;
use crate::metric::{
    lemma5_bound, overlap_count_n, overlap_of_sets, second_moment_bound, series_table, ApproxSet,
    OverlapGeometry, PsiFunction, SeriesPoint,
};
use crate::places::PlaceSet;

use super::config::{ExperimentConfig, OutputFormat};
use super::montecarlo::{mc_union_measure, MCEstimate};
use super::verify::{family, random_rational_point, run_verify, VerifySummary};

fn fr(q: &Rational) -> String {
    arith::format_rational(q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureRow {
    pub gamma: String,
    pub n: String,
    pub nu: Vec<i64>,
    pub level: String,
    #[serde(rename = "L")]
    pub big_l: String,
    pub psi: String,
    pub measure: String,
    pub lower_bound: String,
    pub upper_bound: String,
    pub pass: bool,
}

pub fn measure_rows(sets: &[ApproxSet], places: &PlaceSet) -> Result<Vec<MeasureRow>> {
    sets.iter()
        .map(|s| {
            let g = s.gamma();
            let mb = s.measure_bounds();
            Ok(MeasureRow {
                gamma: g.to_string(),
                n: g.unit().to_string(),
                nu: g.exponents().to_vec(),
                level: fr(&places.level(g)),
                big_l: fr(&places.big_l(g)?),
                psi: fr(s.psi_value()),
                measure: fr(&mb.exact),
                lower_bound: fr(&mb.lower),
                upper_bound: fr(&mb.upper),
                pass: mb.ok,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesRow {
    #[serde(rename = "N")]
    pub level_bound: u64,
    #[serde(rename = "S")]
    pub s: String,
    #[serde(rename = "D")]
    pub d: String,
    /// Empty when `D = 0`.
    #[serde(rename = "R")]
    pub r: String,
}

impl From<&SeriesPoint> for SeriesRow {
    fn from(p: &SeriesPoint) -> Self {
        Self {
            level_bound: p.level_bound,
            s: fr(&p.s),
            d: fr(&p.d),
            r: p.ratio.as_ref().map(fr).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapRow {
    pub beta: String,
    pub gamma: String,
    pub overlap: String,
    pub bound: String,
    pub pass: bool,
    /// `#N(beta, gamma)`; empty when either psi value is 0.
    pub count: String,
    pub count_bound: String,
    pub count_pass: bool,
}

/// One row per unordered pair `beta != gamma`.
pub fn overlap_rows(sets: &[ApproxSet], places: &PlaceSet) -> Result<Vec<OverlapRow>> {
    let mut rows = Vec::new();
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            let ov = overlap_of_sets(a, b);
            let bound = lemma5_bound(a.psi_value(), b.psi_value(), places);
            let (count, count_bound, count_pass) = if a.is_empty() || b.is_empty() {
                (String::new(), String::new(), true)
            } else {
                let g = OverlapGeometry::new(a.gamma(), b.gamma(), a.psi_value(), b.psi_value(), places)?;
                let c = overlap_count_n(&g, places);
                (c.count.to_string(), fr(&c.bound), c.within_bound)
            };
            rows.push(OverlapRow {
                beta: a.gamma().to_string(),
                gamma: b.gamma().to_string(),
                pass: ov <= bound,
                overlap: fr(&ov),
                bound: fr(&bound),
                count,
                count_bound,
                count_pass,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondMoment {
    pub level_bound: u64,
    pub family_size: usize,
    pub sum_measures: String,
    pub sum_pairwise: String,
    pub bound: String,
    pub bound_decimal: f64,
    pub mc_estimate: f64,
    pub mc_standard_error: f64,
    /// `bound <= estimate + 3 standard_error`
    pub pass: bool,
}

/// `(sum lambda)^2 / sum lambda(A_i ∩ A_j)` over `sets`, with every ordered
/// pair (the diagonal included) in the denominator.
pub fn second_moment_of(sets: &[ApproxSet]) -> Result<(Rational, Rational, Rational)> {
    let k = sets.len();
    let measures: Vec<Rational> = sets.iter().map(|s| s.exact_measure().clone()).collect();
    let mut pairwise = vec![vec![Rational::default(); k]; k];
    for i in 0..k {
        pairwise[i][i] = measures[i].clone();
        for j in i + 1..k {
            let v = overlap_of_sets(&sets[i], &sets[j]);
            pairwise[j][i] = v.clone();
            pairwise[i][j] = v;
        }
    }
    let bound = second_moment_bound(&measures, &pairwise)?;
    let sum: Rational = measures.iter().sum();
    let total: Rational = pairwise.iter().flatten().sum();
    Ok((bound, sum, total))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSection {
    pub level_bound: u64,
    pub family_size: usize,
    /// `sum lambda(A_gamma)`, an upper bound for the union.
    pub sum_measures: String,
    #[serde(flatten)]
    pub estimate: MCEstimate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirichletRow {
    pub point: String,
    #[serde(rename = "N")]
    pub level_bound: u64,
    pub beta: String,
    pub gamma: String,
    pub distance: String,
    pub bound: String,
    pub pass: bool,
}

fn format_point(x: &AdelicPoint) -> String {
    x.coords().iter().map(fr).collect::<Vec<_>>().join(";")
}

pub fn dirichlet_row(x: &AdelicPoint, n: u64, places: &PlaceSet) -> Result<DirichletRow> {
    let res = dirichlet_approximate(x, n, places)?;
    let bound = Rational::new(places.max_prime().into(), n.into());
    Ok(DirichletRow {
        point: format_point(x),
        level_bound: n,
        beta: res.beta.to_string(),
        gamma: res.gamma.to_string(),
        pass: res.gamma.is_positive()
            && places.level(&res.gamma) <= Rational::from_integer(n.into())
            && res.achieved_distance <= bound,
        distance: fr(&res.achieved_distance),
        bound: fr(&bound),
    })
}

/// Seeded points times `N = 1, 2, 4, ... <= n_max`.
pub fn dirichlet_rows(places: &PlaceSet, n_max: u64, points: usize, seed: u64) -> Result<Vec<DirichletRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for _ in 0..points {
        let x = random_rational_point(&mut rng, places, 1000);
        let mut n = 1;
        while n <= n_max {
            rows.push(dirichlet_row(&x, n, places)?);
            n *= 2;
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: BTreeMap<&'static str, String>,
    pub measure_table: Vec<MeasureRow>,
    pub series: Vec<SeriesRow>,
    pub overlaps: Vec<OverlapRow>,
    pub second_moment: SecondMoment,
    pub mc: McSection,
    pub dirichlet: Vec<DirichletRow>,
    pub verify_summary: VerifySummary,
}

impl Report {
    /// Whether every bound in the report holds.
    pub fn all_passed(&self) -> bool {
        self.measure_table.iter().all(|r| r.pass)
            && self.overlaps.iter().all(|r| r.pass && r.count_pass)
            && self.second_moment.pass
            && self.dirichlet.iter().all(|r| r.pass)
            && self.verify_summary.all_passed
    }
}

pub fn mc_section(sets: &[ApproxSet], level: u64, cfg: &ExperimentConfig, places: &PlaceSet) -> Result<McSection> {
    let estimate = mc_union_measure(sets, places, cfg.mc_samples, cfg.mc_digits, cfg.seed)?;
    let sum: Rational = sets.iter().map(|s| s.exact_measure()).sum();
    Ok(McSection {
        level_bound: level,
        family_size: sets.len(),
        sum_measures: fr(&sum),
        estimate,
    })
}

pub fn run_report(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let places = cfg.place_set()?;
    let psi: PsiFunction = cfg.psi_function(&places)?;
    let sets = family(&places, &psi, cfg.n_max)?;
    let level = cfg.overlap_level();
    let small: Vec<ApproxSet> = sets
        .iter()
        .filter(|s| places.level(s.gamma()) <= Rational::from_integer(level.into()))
        .cloned()
        .collect();

    let measure_table = measure_rows(&sets, &places)?;
    let series = series_table(&psi, &places, cfg.n_max)?.iter().map(SeriesRow::from).collect();
    let overlaps = overlap_rows(&small, &places)?;
    let mc = mc_section(&small, level, cfg, &places)?;
    let second_moment = match second_moment_of(&small) {
        Ok((bound, sum, total)) => {
            let b = arith::to_f64(&bound);
            SecondMoment {
                level_bound: level,
                family_size: small.len(),
                sum_measures: fr(&sum),
                sum_pairwise: fr(&total),
                bound: fr(&bound),
                bound_decimal: b,
                mc_estimate: mc.estimate.estimate,
                mc_standard_error: mc.estimate.standard_error,
                pass: b <= mc.estimate.estimate + 3.0 * mc.estimate.standard_error,
            }
        }
        Err(Error::ZeroDenominator) => SecondMoment {
            level_bound: level,
            family_size: small.len(),
            sum_measures: "0/1".into(),
            sum_pairwise: "0/1".into(),
            bound: String::new(),
            bound_decimal: 0.0,
            mc_estimate: mc.estimate.estimate,
            mc_standard_error: mc.estimate.standard_error,
            pass: true,
        },
        Err(e) => return Err(e),
    };
    let dirichlet = dirichlet_rows(&places, cfg.n_max, 10, cfg.seed)?;
    let verify_summary = run_verify(cfg)?;
    Ok(Report {
        config: cfg.entries().into_iter().collect(),
        measure_table,
        series,
        overlaps,
        second_moment,
        mc,
        dirichlet,
        verify_summary,
    })
}

/// The measure table with the `nu` column expanded to `nu_<p>` per prime.
pub fn write_measure_csv<W: Write>(rows: &[MeasureRow], places: &PlaceSet, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["gamma".to_string(), "n".to_string()];
    header.extend(places.primes().iter().map(|p| format!("nu_{p}")));
    header.extend(
        ["level", "L", "psi", "measure", "lower_bound", "upper_bound", "pass"].map(String::from),
    );
    wr.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.gamma.clone(), r.n.clone()];
        rec.extend(r.nu.iter().map(i64::to_string));
        rec.extend([
            r.level.clone(),
            r.big_l.clone(),
            r.psi.clone(),
            r.measure.clone(),
            r.lower_bound.clone(),
            r.upper_bound.clone(),
            r.pass.to_string(),
        ]);
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_csv<W: Write, T: Serialize>(rows: &[T], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

fn write_mc_csv<W: Write>(report: &Report, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let sm = &report.second_moment;
    let mc = &report.mc;
    wr.write_record([
        "level_bound",
        "family_size",
        "sum_measures",
        "second_moment_bound",
        "mc_estimate",
        "mc_standard_error",
        "samples",
        "seed",
        "digits",
        "algorithm",
        "pass",
    ])?;
    wr.write_record([
        sm.level_bound.to_string(),
        sm.family_size.to_string(),
        mc.sum_measures.clone(),
        sm.bound.clone(),
        mc.estimate.estimate.to_string(),
        mc.estimate.standard_error.to_string(),
        mc.estimate.samples.to_string(),
        mc.estimate.seed.to_string(),
        mc.estimate.digits.to_string(),
        mc.estimate.algorithm.clone(),
        sm.pass.to_string(),
    ])?;
    wr.flush()?;
    Ok(())
}

/// JSON goes to the file `out`; CSV writes one file per table into the
/// directory `out`. Without `out` everything is printed to stdout.
pub fn write_report(report: &Report, places: &PlaceSet, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    match (format, out) {
        (OutputFormat::Json, Some(path)) => {
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            fs::write(path, text)?;
        }
        (OutputFormat::Json, None) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            serde_json::to_writer_pretty(&mut lock, report)?;
            writeln!(lock)?;
        }
        (OutputFormat::Csv, Some(dir)) => {
            fs::create_dir_all(dir)?;
            write_measure_csv(&report.measure_table, places, fs::File::create(dir.join("measure.csv"))?)?;
            write_csv(&report.series, fs::File::create(dir.join("series.csv"))?)?;
            write_csv(&report.overlaps, fs::File::create(dir.join("overlaps.csv"))?)?;
            write_csv(&report.dirichlet, fs::File::create(dir.join("dirichlet.csv"))?)?;
            write_csv(&report.verify_summary.checks, fs::File::create(dir.join("verify.csv"))?)?;
            write_mc_csv(report, fs::File::create(dir.join("montecarlo.csv"))?)?;
        }
        (OutputFormat::Csv, None) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            writeln!(lock, "# measure")?;
            write_measure_csv(&report.measure_table, places, &mut lock)?;
            writeln!(lock, "# series")?;
            write_csv(&report.series, &mut lock)?;
            writeln!(lock, "# overlaps")?;
            write_csv(&report.overlaps, &mut lock)?;
            writeln!(lock, "# montecarlo")?;
            write_mc_csv(report, &mut lock)?;
            writeln!(lock, "# dirichlet")?;
            write_csv(&report.dirichlet, &mut lock)?;
            writeln!(lock, "# verify")?;
            write_csv(&report.verify_summary.checks, &mut lock)?;
        }
    }
    Ok(())
}
