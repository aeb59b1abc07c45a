//! Dyadic frequency analysis: the filter bank, the block operators
//! `Δ̇_j` and `Ṡ_j`, homogeneous Besov and Chemin-Lerner norms, and Bernstein
//! ratio checks.
//!
//! The dyadic index runs over a finite band `[j_min, j_max]` fixed by the
//! grid. The mean (`k = 0`) mode belongs to no block: Besov norms ignore it
//! and [`BlockNorms::mean`] carries it separately. `Ṡ_j` keeps it, so that
//! `Ṡ_{j_min} f` is the mean of `f`.

mod bernstein;
mod besov;
mod filter;
mod series;

pub use bernstein::{bernstein_ratios, multi_indices, BernsteinReport, BernsteinWindow, SupportShape};
pub use besov::{besov_norm, block_norms, block_norms_spectral, lr_aggregate, BesovSpec, BlockNorms};
pub use filter::{bump, dyadic_profile, FilterBank, ANNULUS_INNER, ANNULUS_OUTER};
pub use series::{
    chemin_lerner_norm, lebesgue_besov_norm, time_norm, SeriesBlockNorms, TimeSeriesField,
};
