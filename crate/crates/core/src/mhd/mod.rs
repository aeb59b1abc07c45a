//! The iterative scheme for the non-resistive MHD system
//!
//! ```text
//! ∂_t u - Δu = P div(-u ⊗ u + B ⊗ B),
//! ∂_t B + u·∇B = B·∇u,          div u = div B = 0,
//! ```
//!
//! with its uniform-bound monitors, horizon selection and the twin-run
//! uniqueness gauge.
//!
//! Iterate `n + 1` solves a heat equation forced by `(uⁿ, Bⁿ)` and a
//! transport equation with velocity `uⁿ` and source `div(uⁿ ⊗ Bⁿ)`, starting
//! from the low-pass data `Ṡ_{n+1}(u0, B0)`. The transport sign follows the
//! equation above.

mod iteration;
mod uniqueness;

pub use iteration::{
    check_uniform_bounds, equation_residual, init_iterate, iterate_once, run_iteration, run_iteration_with,
    select_time_horizon, truncate_initial_data, truncation_level, DecayFit, DiagnosticsRow, HorizonSelection,
    IterationDiagnostics, IterationState, ResidualRow, UniformBounds,
};
pub use uniqueness::{osgood_check, perturbation, twin_run_uniqueness, OsgoodVerdict, UniquenessReport};

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use crate::field::Field;
use crate::spectral::{divergence, leray_project, lp_norm_unchecked};
use crate::{Error, Result};

/// Initial velocity and magnetic field.
#[derive(Debug, Clone, PartialEq)]
pub struct MhdInitialData {
    pub u0: Field,
    pub b0: Field,
}

/// Largest admissible `‖div f‖_{L²}` relative to `max(1, ‖f‖_{L²})`.
pub const DATA_DIVERGENCE_LIMIT: f64 = 1e-10;

impl MhdInitialData {
    /// Checks shapes, solenoidality and zero means.
    pub fn new(u0: Field, b0: Field) -> Result<Self> {
        u0.ensure_compatible(&b0)?;
        let d = u0.grid().dim();
        if u0.components() != d {
            return Err(Error::Components {
                expected: d,
                found: u0.components(),
            });
        }
        for (name, f) in [("u0", &u0), ("B0", &b0)] {
            let div = lp_norm_unchecked(&divergence(f)?, 2.0);
            if div > DATA_DIVERGENCE_LIMIT * lp_norm_unchecked(f, 2.0).max(1.0) {
                return Err(Error::Parameter(alloc::format!(
                    "{name} is not divergence free: |div| = {div:e}"
                )));
            }
            let scale = f.max_magnitude().max(1.0);
            if f.means().iter().any(|m| m.abs() > 1e-12 * scale) {
                return Err(Error::Parameter(alloc::format!("{name} has a nonzero mean")));
            }
        }
        Ok(Self { u0, b0 })
    }

    /// Leray-projects both fields and removes their means first.
    pub fn projected(u0: &Field, b0: &Field) -> Result<Self> {
        let clean = |f: &Field| -> Result<Field> {
            let mut s = leray_project(&f.to_spectral())?;
            for c in 0..s.components() {
                s.component_mut(c)[0] = num_complex::Complex64::new(0.0, 0.0);
            }
            Ok(s.to_physical())
        };
        Self::new(clean(u0)?, clean(b0)?)
    }

    pub fn zeros(grid: crate::grid::FrequencyGrid) -> Self {
        let d = grid.dim();
        Self {
            u0: Field::zeros(grid, d),
            b0: Field::zeros(grid, d),
        }
    }

    /// `u0 = a (sin x1 cos x2, -cos x1 sin x2)`, `B0 = a (cos x1 sin x2, -sin x1 cos x2)`
    /// in the first two axes (zero in the third), both divergence free.
    pub fn taylor_green(grid: crate::grid::FrequencyGrid, amplitude: f64) -> Self {
        let d = grid.dim();
        let u0 = Field::from_fn(grid, d, |x, o| {
            o.fill(0.0);
            o[0] = amplitude * x[0].sin() * x[1].cos();
            o[1] = -amplitude * x[0].cos() * x[1].sin();
        });
        let b0 = Field::from_fn(grid, d, |x, o| {
            o.fill(0.0);
            o[0] = amplitude * x[0].cos() * x[1].sin();
            o[1] = -amplitude * x[0].sin() * x[1].cos();
        });
        Self { u0, b0 }
    }

    pub fn grid(&self) -> &crate::grid::FrequencyGrid {
        self.u0.grid()
    }
}

/// Parameters of an iteration run. The grid comes from the data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationConfig {
    /// Lebesgue index of the Besov scale, in `[1, 2d]`.
    pub p: f64,
    pub dt: f64,
    /// Upper bound for the selected horizon.
    pub t_max: f64,
    /// Store every `cadence`-th step.
    pub cadence: usize,
    pub eta: f64,
    pub c0: f64,
    pub max_iterations: usize,
    /// Stop once `Dₙ ≤ tolerance`.
    pub tolerance: f64,
    pub seed: u64,
    /// Fixed horizon instead of [`select_time_horizon`]; twin runs use it to
    /// share a time mesh.
    pub horizon: Option<f64>,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            dt: 2e-3,
            t_max: 0.5,
            cadence: 1,
            eta: 0.1,
            c0: 16.0,
            max_iterations: 12,
            tolerance: 0.0,
            seed: 0,
            horizon: None,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let upper = 2.0 * dim as f64;
        if !(self.p >= 1.0 && self.p <= upper) {
            return Err(Error::Parameter(alloc::format!(
                "p = {} outside [1, 2d] = [1, {upper}]",
                self.p
            )));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::Parameter(alloc::format!("eta = {} must lie in (0, 1)", self.eta)));
        }
        if !(self.c0 > 1.0 && self.c0.is_finite()) {
            return Err(Error::Parameter(alloc::format!("c0 = {} must exceed 1", self.c0)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(alloc::format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(Error::Parameter(alloc::format!(
                "t_max = {} must be at least dt = {}",
                self.t_max, self.dt
            )));
        }
        if self.cadence == 0 {
            return Err(Error::Parameter("cadence must be at least 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Parameter(alloc::format!("tolerance = {} must be >= 0", self.tolerance)));
        }
        if let Some(h) = self.horizon {
            crate::solvers::step_count(h, self.dt)?;
        }
        Ok(())
    }

    /// Critical regularity `d/p`.
    pub fn critical(&self, dim: usize) -> f64 {
        dim as f64 / self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;

    #[test]
    fn config_validation() {
        let c = IterationConfig::default();
        assert!(c.validate(2).is_ok());
        let bad = IterationConfig { p: 5.0, ..c.clone() };
        let msg = alloc::format!("{}", bad.validate(2).unwrap_err());
        assert!(msg.contains("[1, 2d]"), "{msg}");
        assert!(IterationConfig { p: 5.0, ..c.clone() }.validate(3).is_ok());
        assert!(IterationConfig { eta: 1.0, ..c.clone() }.validate(2).is_err());
        assert!(IterationConfig { c0: 1.0, ..c.clone() }.validate(2).is_err());
        assert!(IterationConfig { horizon: Some(0.0031), ..c }.validate(2).is_err());
    }

    #[test]
    fn initial_data_checks() {
        let g = FrequencyGrid::periodic(2, 16).unwrap();
        let tg = MhdInitialData::taylor_green(g, 0.05);
        assert!(MhdInitialData::new(tg.u0.clone(), tg.b0.clone()).is_ok());
        let compressive = Field::from_fn(g, 2, |x, o| {
            o[0] = x[0].sin();
            o[1] = 0.0;
        });
        assert!(MhdInitialData::new(compressive.clone(), tg.b0.clone()).is_err());
        let fixed = MhdInitialData::projected(&compressive, &tg.b0).unwrap();
        assert!(lp_norm_unchecked(&fixed.u0, 2.0) < 1e-14);
        let shifted = Field::from_fn(g, 2, |_, o| o.copy_from_slice(&[1.0, 0.0]));
        assert!(MhdInitialData::new(shifted, tg.b0).is_err());
    }
}
