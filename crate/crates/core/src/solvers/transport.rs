use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use super::{snapshot_steps, step_count};
use crate::field::{Field, SpectralField};
use crate::grid::Lattice;
use crate::littlewood_paley::{block_norms, FilterBank, TimeSeriesField};
use crate::paraproduct::{named, EstimateReport};
use crate::spectral::{
    divergence, forward_in_place, gradient, lp_norm_unchecked, mask_slice, masked_physical, physical_component,
};
use crate::stats::cumulative_trapezoid;
use crate::{Error, Result};

/// Largest admissible `dt · max|v| · N / L`.
pub const CFL_LIMIT: f64 = 0.5;
/// Largest admissible `‖div v‖_{L²} / max(1, ‖v‖_{L²})`.
pub const DIVERGENCE_LIMIT: f64 = 1e-8;

/// `∂_t f + v·∇f = g`, `f(0) = f0` on `[0, horizon]`.
///
/// Velocity and source are sampled by linear interpolation between their
/// snapshots. `None` means `g = 0`.
#[derive(Debug, Clone)]
pub struct TransportProblem {
    pub f0: Field,
    pub velocity: TimeSeriesField,
    pub source: Option<TimeSeriesField>,
    pub horizon: f64,
    pub dt: f64,
    pub cadence: usize,
}

impl TransportProblem {
    pub fn new(
        f0: Field,
        velocity: TimeSeriesField,
        source: Option<TimeSeriesField>,
        horizon: f64,
        dt: f64,
        cadence: usize,
    ) -> Result<Self> {
        let problem = Self {
            f0,
            velocity,
            source,
            horizon,
            dt,
            cadence,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        step_count(self.horizon, self.dt)?;
        let grid = *self.f0.grid();
        let v0 = self.velocity.first();
        if *v0.grid() != grid {
            return Err(Error::GridMismatch);
        }
        if v0.components() != grid.dim() {
            return Err(Error::Components {
                expected: grid.dim(),
                found: v0.components(),
            });
        }
        if !self.velocity.covers(self.horizon) {
            return Err(Error::Coverage {
                what: "velocity",
                horizon: self.horizon,
            });
        }
        if let Some(g) = &self.source {
            self.f0.ensure_compatible(g.first())?;
            if !g.covers(self.horizon) {
                return Err(Error::Coverage {
                    what: "source",
                    horizon: self.horizon,
                });
            }
        }
        let mut vmax: f64 = 0.0;
        for v in self.velocity.snapshots() {
            let scale = lp_norm_unchecked(v, 2.0).max(1.0);
            let div = lp_norm_unchecked(&divergence(v)?, 2.0);
            if div > DIVERGENCE_LIMIT * scale {
                return Err(Error::Divergence(div));
            }
            vmax = vmax.max(v.max_magnitude());
        }
        let courant = self.dt * vmax * grid.points() as f64 / grid.length();
        if courant > CFL_LIMIT {
            return Err(Error::Cfl {
                dt: self.dt,
                limit: CFL_LIMIT * grid.length() / (grid.points() as f64 * vmax),
            });
        }
        Ok(())
    }
}

/// Dealiased `v·∇f` in Fourier space, for a velocity already masked and
/// brought to the grid.
fn advect(velocity: &[Vec<f64>], f: &SpectralField, lattice: &Lattice) -> SpectralField {
    let grid = lattice.grid;
    let d = grid.dim();
    let len = lattice.len();
    let mut out = SpectralField::zeros(grid, f.components());
    let mut work = vec![Complex64::new(0.0, 0.0); len];
    let mut acc = vec![0.0; len];
    for c in 0..f.components() {
        let src = f.component(c);
        acc.iter_mut().for_each(|a| *a = 0.0);
        for j in 0..d {
            for flat in 0..len {
                work[flat] = if lattice.dealias[flat] {
                    src[flat] * Complex64::new(0.0, lattice.k[flat][j])
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            let df = physical_component(&work, lattice);
            for x in 0..len {
                acc[x] += velocity[j][x] * df[x];
            }
        }
        let dst = out.component_mut(c);
        for (z, a) in dst.iter_mut().zip(&acc) {
            *z = Complex64::new(*a, 0.0);
        }
        forward_in_place(dst, lattice);
        mask_slice(dst, lattice);
    }
    out
}

/// Dealiased `v·∇f` for physical inputs.
pub fn advection(v: &Field, f: &Field) -> Result<Field> {
    let grid = *f.grid();
    if *v.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if v.components() != grid.dim() {
        return Err(Error::Components {
                expected: grid.dim(),
                found: v.components(),
            });
    }
    let lattice = grid.lattice();
    let pv = masked_physical(&v.to_spectral(), &lattice);
    Ok(advect(&pv, &f.to_spectral(), &lattice).to_physical())
}

/// Classical RK4 on `∂_t f̂ = -(v·∇f)^ + ĝ` with dealiased products.
pub fn solve_transport(problem: &TransportProblem) -> Result<TimeSeriesField> {
    problem.validate()?;
    let steps = step_count(problem.horizon, problem.dt)?;
    let dt = problem.dt;
    let grid = *problem.f0.grid();
    let lattice = grid.lattice();

    let velocity_at = |t: f64| masked_physical(&problem.velocity.interpolate(t).to_spectral(), &lattice);
    let source_at = |t: f64| problem.source.as_ref().map(|g| g.interpolate(t).to_spectral());
    let rhs = |v: &[Vec<f64>], g: &Option<SpectralField>, f: &SpectralField| {
        let mut out = advect(v, f, &lattice).scaled(-1.0);
        if let Some(g) = g {
            out.add_assign(g);
        }
        out
    };

    let stored = snapshot_steps(steps, problem.cadence);
    let mut next_store = 0;
    let mut times = Vec::with_capacity(stored.len());
    let mut snapshots = Vec::with_capacity(stored.len());
    let mut state = problem.f0.to_spectral();
    let mut v_now = velocity_at(0.0);
    let mut g_now = source_at(0.0);
    for step in 0..=steps {
        if next_store < stored.len() && stored[next_store] == step {
            times.push(step as f64 * dt);
            snapshots.push(state.to_physical());
            next_store += 1;
        }
        if step == steps {
            break;
        }
        let t = step as f64 * dt;
        let t_mid = t + 0.5 * dt;
        let t_next = (step + 1) as f64 * dt;
        let v_mid = velocity_at(t_mid);
        let v_next = velocity_at(t_next);
        let g_mid = source_at(t_mid);
        let g_next = source_at(t_next);

        let k1 = rhs(&v_now, &g_now, &state);
        let mut stage = state.clone();
        stage.axpy_assign(0.5 * dt, &k1);
        let k2 = rhs(&v_mid, &g_mid, &stage);
        let mut stage = state.clone();
        stage.axpy_assign(0.5 * dt, &k2);
        let k3 = rhs(&v_mid, &g_mid, &stage);
        let mut stage = state.clone();
        stage.axpy_assign(dt, &k3);
        let k4 = rhs(&v_next, &g_next, &stage);
        state.axpy_assign(dt / 6.0, &k1);
        state.axpy_assign(dt / 3.0, &k2);
        state.axpy_assign(dt / 3.0, &k3);
        state.axpy_assign(dt / 6.0, &k4);

        v_now = v_next;
        g_now = g_next;
    }
    TimeSeriesField::new(times, snapshots)
}

/// Open window `(-d min(1/p, 1 - 1/p) - 1, 1 + d/p)` for the transport
/// estimate; the right endpoint is admitted when `r = 1`.
pub fn transport_index_window(d: usize, p: f64) -> (f64, f64) {
    let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let d = d as f64;
    (-d * inv.min(1.0 - inv) - 1.0, 1.0 + d * inv)
}

/// Traces of the transport estimate over a run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateMonitor {
    pub times: Vec<f64>,
    /// `V(t) = ∫_0^t ‖∇v‖_{Ḃ^{d/p}_{p,r} ∩ L^∞}`.
    pub v_cumulative: Vec<f64>,
    /// `‖f‖_{L̃^∞_t(Ḃ^s_{p,r})}`.
    pub lhs: Vec<f64>,
    /// Right side evaluated at the reported constant.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float::seq"))]
    pub rhs: Vec<f64>,
    /// Smallest `C ≥ 0` for which `lhs ≤ rhs` at every stored time;
    /// infinite when no finite constant works.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub constant: f64,
    /// `s = 1 + d/p` with `r = 1`.
    pub endpoint: bool,
}

impl EstimateMonitor {
    pub fn ratio_trace(&self) -> Vec<f64> {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(l, r)| if *r > 0.0 { l / r } else { 0.0 })
            .collect()
    }
}

/// Right side `e^{C V(t)} (‖f0‖ + ∫_0^t e^{-C V(τ)} ‖g(τ)‖ dτ)` at every time.
fn transport_rhs(times: &[f64], v: &[f64], f0: f64, g: &[f64], c: f64) -> Vec<f64> {
    let integrand: Vec<f64> = g.iter().zip(v).map(|(g, v)| (-c * v).exp() * g).collect();
    let integral = cumulative_trapezoid(times, &integrand);
    v.iter()
        .zip(&integral)
        .map(|(v, i)| (c * v).exp() * (f0 + i))
        .collect()
}

/// Relative slack absorbing roundoff in `lhs ≤ rhs`.
const ROUNDOFF: f64 = 1e-12;

fn holds(lhs: &[f64], rhs: &[f64]) -> bool {
    lhs.iter().zip(rhs).all(|(l, r)| *l <= r * (1.0 + ROUNDOFF))
}

/// Minimal-constant monitor for
/// `‖f‖_{L̃^∞_t(Ḃ^s_{p,r})} ≤ e^{CV(t)} (‖f0‖ + ∫_0^t e^{-CV} ‖g‖)`.
pub fn transport_estimate_report(
    bank: &FilterBank,
    problem: &TransportProblem,
    solution: &TimeSeriesField,
    s: f64,
    p: f64,
    r: f64,
) -> Result<(EstimateReport, EstimateMonitor)> {
    crate::littlewood_paley::BesovSpec::new(s, p, r)?;
    let d = bank.grid().dim();
    let (lo, hi) = transport_index_window(d, p);
    let endpoint = r == 1.0 && s == hi;
    if !(s > lo && (s < hi || endpoint)) {
        return Err(Error::IndexCondition(alloc::format!(
            "transport estimate requires s in ({lo}, {hi}), or s = {hi} with r = 1; got s = {s}"
        )));
    }
    let times = solution.times().to_vec();
    let lhs = solution.block_norms(bank, p)?.chemin_lerner_trace(s, f64::INFINITY, r);
    let critical = d as f64 / p;
    let grad_norms = times
        .iter()
        .map(|&t| {
            let grad = gradient(&problem.velocity.interpolate(t));
            let besov = block_norms(bank, &grad, p)?.besov(critical, r);
            Ok(besov.max(lp_norm_unchecked(&grad, f64::INFINITY)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let v_cumulative = cumulative_trapezoid(&times, &grad_norms);
    let f0 = block_norms(bank, &problem.f0, p)?.besov(s, r);
    let g = match &problem.source {
        None => vec![0.0; times.len()],
        Some(src) => times
            .iter()
            .map(|&t| Ok(block_norms(bank, &src.interpolate(t), p)?.besov(s, r)))
            .collect::<Result<Vec<f64>>>()?,
    };
    let at = |c: f64| transport_rhs(&times, &v_cumulative, f0, &g, c);
    let constant = if holds(&lhs, &at(0.0)) {
        0.0
    } else {
        let mut upper = 1.0;
        while !holds(&lhs, &at(upper)) && upper < 1e12 {
            upper *= 2.0;
        }
        if !holds(&lhs, &at(upper)) {
            f64::INFINITY
        } else {
            let mut lower = 0.0;
            while upper - lower > 1e-9 * upper {
                let mid = 0.5 * (lower + upper);
                if holds(&lhs, &at(mid)) {
                    upper = mid;
                } else {
                    lower = mid;
                }
            }
            upper
        }
    };
    let rhs = if constant.is_finite() { at(constant) } else { at(0.0) };
    let last = times.len() - 1;
    let mut indices = named(&[("s", s), ("p", p), ("r", r), ("C_min", constant)]);
    indices.push((String::from("V_T"), v_cumulative[last]));
    indices.push((String::from("endpoint"), if endpoint { 1.0 } else { 0.0 }));
    let report = EstimateReport::new(
        "transport",
        indices,
        lhs[last],
        vec![(String::from("rhs at C_min"), rhs[last])],
    );
    Ok((
        report,
        EstimateMonitor {
            times,
            v_cumulative,
            lhs,
            rhs,
            constant,
            endpoint,
        },
    ))
}
