use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use diagapprox::arith::{self, parse_rational};
use diagapprox::dirichlet::{coprime_approximants, enumerate_z_n};
use diagapprox::harness::config::ExperimentConfig;
use diagapprox::harness::report::{self, McSection};
use diagapprox::harness::verify::family;
use diagapprox::harness::{run_report, run_verify, write_report, OutputFormat};
use diagapprox::metric::{build_approx_set, ApproxSet};
use diagapprox::{AdelicPoint, Error, PlaceSet, Rational};

#[derive(Parser)]
#[command(name = "diagapprox", version, about = "Exact diagonal Diophantine approximation experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Finite primes, comma separated (e.g. 2,3)
    #[arg(long, global = true)]
    places: Option<String>,
    /// psi family: scaled_cap, power or table
    #[arg(long, global = true)]
    psi: Option<String>,
    #[arg(long, global = true)]
    c: Option<String>,
    #[arg(long, global = true)]
    theta: Option<String>,
    /// File of `gamma value` lines for psi = table
    #[arg(long, global = true)]
    psi_table: Option<String>,
    #[arg(long, global = true)]
    n_max: Option<String>,
    /// Level bound for overlap, second-moment and Monte Carlo families
    #[arg(long, global = true)]
    overlap_n_max: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    /// p-adic digits per place for sampling, or `auto`
    #[arg(long, global = true)]
    digits: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Dirichlet approximants of one point
    Dirichlet {
        /// Coordinates, infinite place first (e.g. 5/7,1/7)
        #[arg(long)]
        point: String,
        /// Return this many coprime approximants instead of one approximant at N = n-max
        #[arg(long)]
        count: Option<usize>,
    },
    /// List Z_N for N = n-max
    Enumerate,
    /// Exact measures of A_gamma with their bounds
    Measure {
        /// A single gamma instead of every gamma with level <= n-max
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Exact pairwise overlaps with the lemma bound
    Overlap {
        #[arg(long, requires = "gamma")]
        beta: Option<String>,
        #[arg(long, requires = "beta")]
        gamma: Option<String>,
    },
    /// Partial sums S(N), D(N) and ratio R(N)
    Series,
    /// Monte Carlo estimate of a union of A_gamma
    Montecarlo {
        /// Comma-separated gammas; defaults to every gamma with level <= overlap-n-max
        #[arg(long)]
        gammas: Option<String>,
    },
    /// Run the invariant suite
    Verify,
    /// Everything in one artifact
    Report,
}

enum Failure {
    Usage(String),
    Bound,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<bool, Failure>;

fn load_config(c: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let flags = [
        ("places", &c.places),
        ("psi", &c.psi),
        ("c", &c.c),
        ("theta", &c.theta),
        ("psi_table", &c.psi_table),
        ("n_max", &c.n_max),
        ("overlap_n_max", &c.overlap_n_max),
        ("samples", &c.samples),
        ("digits", &c.digits),
        ("seed", &c.seed),
        ("out", &c.out),
        ("format", &c.format),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit<T: Serialize>(rows: &[T], cfg: &ExperimentConfig) -> Result<(), Error> {
    let mut w = sink(cfg.out.as_deref())?;
    match cfg.format {
        OutputFormat::Csv => report::write_csv(rows, &mut w)?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn parse_point(s: &str, places: &PlaceSet) -> Result<AdelicPoint, Error> {
    let coords = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<Rational>, _>>()?;
    if coords.len() != places.len() {
        return Err(Error::MismatchedPlaces {
            expected: places.len(),
            found: coords.len(),
        });
    }
    Ok(AdelicPoint::new(coords))
}

fn parse_gamma(s: &str, places: &PlaceSet) -> Result<diagapprox::PzElement, Error> {
    places.decompose(&parse_rational(s)?)
}

#[derive(Serialize)]
struct ZetaRow {
    zeta: String,
    n: String,
    nu: String,
    level: String,
}

#[derive(Serialize)]
struct PairRow {
    beta: String,
    gamma: String,
    distance: String,
    bound: String,
    pass: bool,
}

fn run(cli: Cli) -> CliResult {
    let cfg = load_config(&cli.common)?;
    let places = cfg.place_set()?;
    let psi = cfg.psi_function(&places)?;
    match cli.command {
        Command::Dirichlet { point, count } => {
            let x = parse_point(&point, &places)?;
            match count {
                None => {
                    let row = report::dirichlet_row(&x, cfg.n_max, &places)?;
                    let pass = row.pass;
                    emit(&[row], &cfg)?;
                    Ok(pass)
                }
                Some(k) => {
                    let m = Rational::from_integer(places.max_prime().into());
                    let pairs = coprime_approximants(&x, k, cfg.n_max, &places)?;
                    let rows: Vec<_> = pairs
                        .iter()
                        .map(|p| {
                            let bound = &m / places.level(&p.gamma);
                            PairRow {
                                beta: p.beta.to_string(),
                                gamma: p.gamma.to_string(),
                                pass: p.distance <= bound,
                                distance: arith::format_rational(&p.distance),
                                bound: arith::format_rational(&bound),
                            }
                        })
                        .collect();
                    emit(&rows, &cfg)?;
                    Ok(rows.iter().all(|r| r.pass))
                }
            }
        }
        Command::Enumerate => {
            let rows: Vec<_> = enumerate_z_n(&places, cfg.n_max)?
                .iter()
                .map(|z| ZetaRow {
                    zeta: z.to_string(),
                    n: z.unit().to_string(),
                    nu: z.exponents().iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
                    level: arith::format_rational(&places.level(z)),
                })
                .collect();
            emit(&rows, &cfg)?;
            Ok(true)
        }
        Command::Measure { gamma } => {
            let sets = match gamma {
                Some(g) => vec![build_approx_set(&parse_gamma(&g, &places)?, &psi, &places)?],
                None => family(&places, &psi, cfg.n_max)?,
            };
            let rows = report::measure_rows(&sets, &places)?;
            match cfg.format {
                OutputFormat::Csv => {
                    report::write_measure_csv(&rows, &places, sink(cfg.out.as_deref())?)?
                }
                OutputFormat::Json => emit(&rows, &cfg)?,
            }
            Ok(rows.iter().all(|r| r.pass))
        }
        Command::Overlap { beta, gamma } => {
            let sets = match (beta, gamma) {
                (Some(b), Some(g)) => vec![
                    build_approx_set(&parse_gamma(&b, &places)?, &psi, &places)?,
                    build_approx_set(&parse_gamma(&g, &places)?, &psi, &places)?,
                ],
                _ => family(&places, &psi, cfg.overlap_level())?,
            };
            let rows = report::overlap_rows(&sets, &places)?;
            emit(&rows, &cfg)?;
            Ok(rows.iter().all(|r| r.pass && r.count_pass))
        }
        Command::Series => {
            let rows: Vec<report::SeriesRow> = diagapprox::metric::series_table(&psi, &places, cfg.n_max)?
                .iter()
                .map(Into::into)
                .collect();
            emit(&rows, &cfg)?;
            Ok(true)
        }
        Command::Montecarlo { gammas } => {
            let (sets, level): (Vec<ApproxSet>, u64) = match gammas {
                Some(list) => (
                    list.split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|g| build_approx_set(&parse_gamma(g, &places)?, &psi, &places))
                        .collect::<Result<_, _>>()?,
                    0,
                ),
                None => (family(&places, &psi, cfg.overlap_level())?, cfg.overlap_level()),
            };
            let section: McSection = report::mc_section(&sets, level, &cfg, &places)?;
            emit(&[section], &cfg)?;
            Ok(true)
        }
        Command::Verify => {
            let summary = run_verify(&cfg)?;
            emit(&summary.checks, &cfg)?;
            Ok(summary.all_passed)
        }
        Command::Report => {
            let rep = run_report(&cfg)?;
            write_report(&rep, &places, cfg.format, cfg.out.as_deref())?;
            Ok(rep.all_passed())
        }
    }
    .and_then(|ok| if ok { Ok(true) } else { Err(Failure::Bound) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Bound) => {
            eprintln!("a bound verification failed");
            ExitCode::from(2)
        }
    }
}
