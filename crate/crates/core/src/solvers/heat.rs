use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use super::{snapshot_steps, step_count};
use crate::field::{Field, SpectralField};
use crate::littlewood_paley::{FilterBank, TimeSeriesField};
use crate::paraproduct::{named, EstimateReport};
use crate::{Error, Result};

/// `∂_t u - Δu = G`, `u(0) = u0` on `[0, horizon]`.
///
/// The forcing is sampled by linear interpolation between its snapshots
/// and must cover the horizon. `None` means `G = 0`.
#[derive(Debug, Clone)]
pub struct HeatProblem {
    pub u0: Field,
    pub forcing: Option<TimeSeriesField>,
    pub horizon: f64,
    pub dt: f64,
    pub cadence: usize,
}

impl HeatProblem {
    pub fn new(u0: Field, forcing: Option<TimeSeriesField>, horizon: f64, dt: f64, cadence: usize) -> Result<Self> {
        let problem = Self {
            u0,
            forcing,
            horizon,
            dt,
            cadence,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        step_count(self.horizon, self.dt)?;
        if let Some(g) = &self.forcing {
            self.u0.ensure_compatible(g.first())?;
            if !g.covers(self.horizon) {
                return Err(Error::Coverage {
                    what: "forcing",
                    horizon: self.horizon,
                });
            }
        }
        Ok(())
    }
}

/// Per-mode ETD2 weights `(e^{-ah}, φ1, φ2)` for `a = |k|²`, with
/// `φ1 = (1 - e^{-ah}) / a` and `φ2 = (ah - 1 + e^{-ah}) / (a² h)`.
pub fn etd2_weights(k2: f64, h: f64) -> (f64, f64, f64) {
    let x = k2 * h;
    let e = (-x).exp();
    if x < 1e-3 {
        // Taylor series; the closed forms cancel catastrophically here.
        let phi1 = h * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 + x * x * x * x / 120.0);
        let phi2 = h * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 + x * x * x * x / 720.0);
        (e, phi1, phi2)
    } else {
        let phi1 = -(-x).exp_m1() / k2;
        let phi2 = (x - 1.0 + e) / (k2 * x);
        (e, phi1, phi2)
    }
}

/// Exponential integrator, exact for `G` linear in time on each step.
pub fn solve_heat(problem: &HeatProblem) -> Result<TimeSeriesField> {
    problem.validate()?;
    let steps = step_count(problem.horizon, problem.dt)?;
    let dt = problem.dt;
    let grid = *problem.u0.grid();
    let lattice = grid.lattice();
    let weights: Vec<(f64, f64, f64)> = lattice.k2.iter().map(|&k2| etd2_weights(k2, dt)).collect();
    let len = grid.len();
    let components = problem.u0.components();

    let forcing_at = |step: usize| -> Option<SpectralField> {
        problem
            .forcing
            .as_ref()
            .map(|g| g.interpolate(step as f64 * dt).to_spectral())
    };

    let stored = snapshot_steps(steps, problem.cadence);
    let mut next_store = 0;
    let mut times = Vec::with_capacity(stored.len());
    let mut snapshots = Vec::with_capacity(stored.len());
    let mut state = problem.u0.to_spectral();
    let mut g_now = forcing_at(0);
    for step in 0..=steps {
        if next_store < stored.len() && stored[next_store] == step {
            times.push(step as f64 * dt);
            snapshots.push(state.to_physical());
            next_store += 1;
        }
        if step == steps {
            break;
        }
        let g_next = forcing_at(step + 1);
        for c in 0..components {
            let dst = state.component_mut(c);
            for flat in 0..len {
                let (e, phi1, phi2) = weights[flat];
                let mut z = dst[flat] * e;
                if let (Some(g0), Some(g1)) = (&g_now, &g_next) {
                    let a = g0.component(c)[flat];
                    let b = g1.component(c)[flat];
                    z += a * phi1 + (b - a) * phi2;
                }
                dst[flat] = z;
            }
        }
        g_now = g_next;
    }
    TimeSeriesField::new(times, snapshots)
}

/// Empirical constant of
/// `‖u‖_{L̃^q_T(Ḃ^{s+2/q}_{p,r})} ≤ C (‖u0‖_{Ḃ^s_{p,r}} + ‖G‖_{L̃^{q1}_T(Ḃ^{s-2+2/q1}_{p,r})})`.
#[allow(clippy::too_many_arguments)]
pub fn heat_estimate_report(
    bank: &FilterBank,
    problem: &HeatProblem,
    solution: &TimeSeriesField,
    q: f64,
    q1: f64,
    s: f64,
    p: f64,
    r: f64,
) -> Result<EstimateReport> {
    crate::littlewood_paley::BesovSpec::new(s, p, r)?
        .with_time(q)?
        .with_time(q1)?;
    if q1 > q {
        return Err(Error::IndexCondition(alloc::format!(
            "heat estimate requires q1 <= q, got q1 = {q1}, q = {q}"
        )));
    }
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let lhs = solution.block_norms(bank, p)?.chemin_lerner(s + 2.0 * inv(q), q, r);
    let data = crate::littlewood_paley::block_norms(bank, &problem.u0, p)?.besov(s, r);
    let forcing = match &problem.forcing {
        None => 0.0,
        Some(g) => {
            let count = g.times().partition_point(|&t| t <= problem.horizon * (1.0 + 1e-12));
            g.prefix(count.max(1))?
                .block_norms(bank, p)?
                .chemin_lerner(s - 2.0 + 2.0 * inv(q1), q1, r)
        }
    };
    let mut indices = named(&[("q", q), ("q1", q1), ("s", s), ("p", p), ("r", r)]);
    indices.push((String::from("u0_norm"), data));
    indices.push((String::from("forcing_norm"), forcing));
    Ok(EstimateReport::new(
        "heat",
        indices,
        lhs,
        vec![(String::from("u0 + G"), data + forcing)],
    ))
}
