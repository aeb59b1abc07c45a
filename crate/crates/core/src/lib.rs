//! Littlewood-Paley analysis and an iterative solver for the non-resistive
//! MHD system on a periodic box.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, configuration and the command line
//! live in the `lpmhd` companion crate.
//!
//! Module map:
//!
//! - [`grid`], [`field`], [`spectral`]: periodic grids, real fields and
//!   their Fourier coefficients, spectral calculus, the Leray projector, the
//!   heat semigroup, Lebesgue norms and dealiased products.
//! - [`littlewood_paley`]: the dyadic filter bank, block operators, Besov and
//!   Chemin-Lerner norms, Bernstein ratios.
//! - [`paraproduct`]: Bony's decomposition and empirical product-law and
//!   logarithmic-interpolation ratios.
//! - [`solvers`]: heat and transport integrators with their a-priori
//!   estimate monitors.
//! - [`mhd`]: the iterative scheme, uniform-bound monitors, horizon
//!   selection and the twin-run uniqueness gauge.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod littlewood_paley;
pub mod mhd;
pub mod paraproduct;
pub mod random;
#[cfg(feature = "serde")]
pub mod serde_float;
pub mod solvers;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use field::{Field, SpectralField, TensorField};
pub use grid::FrequencyGrid;
pub use littlewood_paley::{BesovSpec, FilterBank, TimeSeriesField};
pub use num_complex::Complex64;
pub use paraproduct::EstimateReport;
