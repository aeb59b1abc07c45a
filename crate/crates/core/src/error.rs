use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: expected 2 or 3")]
    Dimension(usize),
    #[error("points per axis must be a power of two and at least 8, got {0}")]
    GridSize(usize),
    #[error("box length must be positive and finite, got {0}")]
    BoxLength(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("component mismatch: expected {expected}, found {found}")]
    Components { expected: usize, found: usize },
    #[error("sample buffer has length {found}, expected {expected}")]
    Samples { expected: usize, found: usize },
    #[error("field contains non-finite samples")]
    NonFinite,
    #[error("exponent {0} outside [1, inf]")]
    Exponent(f64),
    #[error("axis {axis} out of range for dimension {dim}")]
    Axis { axis: usize, dim: usize },
    #[error("dyadic index {j} outside [{min}, {max}]")]
    BlockIndex { j: i32, min: i32, max: i32 },
    #[error("dyadic band [{j_min}, {j_max}] invalid: {reason}")]
    FilterBand { j_min: i32, j_max: i32, reason: String },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("time series is empty")]
    EmptySeries,
    #[error("time series invalid: {0}")]
    Series(String),
    #[error("{what} does not cover [0, {horizon}]")]
    Coverage { what: &'static str, horizon: f64 },
    #[error("CFL condition violated: dt = {dt} exceeds the limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("velocity is not divergence free: |div v| = {0:e}")]
    Divergence(f64),
    #[error("spectral support check failed: {0}")]
    Support(String),
    #[error("index condition violated: {0}")]
    IndexCondition(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}
