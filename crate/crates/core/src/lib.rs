//! Exact diagonal Diophantine approximation in `R x Q_p1 x ... x Q_pr`.
//!
//! The crate builds Dirichlet approximants by a pigeonhole search, constructs
//! the approximation sets `A_gamma(psi)` as finite unions of boxes with exact
//! Haar measures, computes their pairwise overlaps exactly, and estimates the
//! measure of truncated unions by seeded Monte Carlo sampling.

pub mod arith;
pub mod dirichlet;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod metric;
pub mod places;

pub use arith::Rational;
pub use error::{Error, Result};
pub use geometry::{AdelicPoint, ApproxBox, FundamentalDomainPoint, Openness, PadicBall};
pub use places::{Place, PlaceSet, PzElement};
