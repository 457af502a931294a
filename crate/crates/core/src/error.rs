use thiserror::Error;

use crate::places::PzElement;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("valuation of zero is +infinity")]
    ZeroValuation,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {0} listed more than once")]
    DuplicatePrime(u64),

    #[error("a place set needs at least one finite prime")]
    NoFinitePlaces,

    #[error("{0} is not in the localization: denominator has a prime outside the place set")]
    NotInLocalization(String),

    #[error("expected {expected} coordinates, got {found}")]
    MismatchedPlaces { expected: usize, found: usize },

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(String),

    #[error("{0} must be nonzero")]
    ZeroArgument(&'static str),

    #[error("{0} must be positive")]
    NotPositive(&'static str),

    #[error("level bound N must be at least 1")]
    InvalidLevelBound,

    #[error("all coordinates are equal, so the point lies in the diagonal image of Q")]
    DiagonalRational,

    #[error("only {} coprime pairs found up to N = {n_max}", found.len())]
    Exhausted {
        n_max: u64,
        found: Vec<(PzElement, PzElement, num_rational::BigRational)>,
    },

    #[error("psi({gamma}) = {value} exceeds the cap 1/(2L) = {cap}")]
    CapViolation {
        gamma: String,
        value: String,
        cap: String,
    },

    #[error("invalid psi parameter: {0}")]
    InvalidPsi(String),

    #[error("sampling precision too coarse: {0}")]
    PrecisionViolation(String),

    #[error("second-moment denominator is zero")]
    ZeroDenominator,

    #[error("invalid pairwise overlap matrix: {0}")]
    InvalidOverlapMatrix(String),

    #[error("transfer map needs a prime q > {product}, got {q}")]
    InvalidTransferPrime { q: u64, product: u64 },

    #[error("value out of supported range: {0}")]
    OutOfRange(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
