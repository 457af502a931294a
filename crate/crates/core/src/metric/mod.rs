//! Approximation functions, the sets `A_gamma(psi)`, their overlaps, the
//! divergence series and the transfer maps of `Z_P`.

pub mod approx_set;
pub mod overlap;
pub mod psi;
pub mod series;
pub mod transfer;

pub use approx_set::{
    build_approx_set, measure_bounds_check, membership, membership_by_search, ApproxSet,
    MeasureBounds,
};
pub use overlap::{
    count_linear_solutions, count_window_pairs, lemma5_bound, overlap_by_box_pairs,
    overlap_count_n, overlap_measure, overlap_of_sets, OverlapCount, OverlapGeometry,
};
pub use psi::{psi_cap, PsiFamily, PsiFunction};
pub use series::{level_ordered, second_moment_bound, series_partial, series_table, SeriesPoint};
pub use transfer::transfer_map;
