//! Time integrators for the forced heat equation and the linear transport
//! equation, each paired with a monitor for its a-priori estimate.

mod heat;
mod transport;

pub use heat::{etd2_weights, heat_estimate_report, solve_heat, HeatProblem};
pub use transport::{
    advection, solve_transport, transport_estimate_report, transport_index_window, EstimateMonitor,
    TransportProblem,
};

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Number of `dt` steps in `horizon`, which must be a multiple of `dt`.
pub(crate) fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(alloc::format!("dt must be positive, got {dt}")));
    }
    if !(horizon >= dt && horizon.is_finite()) {
        return Err(Error::Parameter(alloc::format!(
            "horizon {horizon} must be at least one step of {dt}"
        )));
    }
    let steps = (horizon / dt).round();
    if (steps * dt - horizon).abs() > 1e-9 * horizon {
        return Err(Error::Parameter(alloc::format!(
            "horizon {horizon} is not a multiple of dt = {dt}"
        )));
    }
    Ok(steps as usize)
}

/// Step indices at which snapshots are stored: every `cadence`-th step and
/// always the last one.
pub(crate) fn snapshot_steps(steps: usize, cadence: usize) -> Vec<usize> {
    let cadence = cadence.max(1);
    let mut out: Vec<usize> = (0..=steps).step_by(cadence).collect();
    if *out.last().expect("nonempty") != steps {
        out.push(steps);
    }
    out
}
