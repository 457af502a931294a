//! Experiment driver: configuration, Monte Carlo estimation, the invariant
//! suite and report output.

pub mod config;
pub mod montecarlo;
pub mod report;
pub mod verify;

pub use config::{ExperimentConfig, OutputFormat, PsiKind};
pub use montecarlo::{mc_union_measure, sample_fundamental_domain, MCEstimate};
pub use report::{run_report, write_report, Report};
pub use verify::{run_verify, CheckResult, VerifySummary};
