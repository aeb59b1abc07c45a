use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use super::{IterationConfig, MhdInitialData};
use crate::field::{Field, SpectralField};
use crate::littlewood_paley::{block_norms, FilterBank, SeriesBlockNorms, TimeSeriesField};
use crate::solvers::{advection, solve_heat, snapshot_steps, solve_transport, step_count, HeatProblem, TransportProblem};
use crate::spectral::{
    heat_semigroup, leray_in_place, leray_project, lp_norm_unchecked, masked_physical,
    tensor_divergence_from_physical, tensor_divergence_spectral,
};
use crate::stats::{cumulative_trapezoid, linear_fit};
use crate::{Error, Result};

/// Low-pass level used for the data of iterate `n`: `n`, clamped to the
/// bank's range `[j_min, j_max + 1]`. Above `j_max + 1` the low-pass filter
/// is already the identity on the resolved band.
pub fn truncation_level(bank: &FilterBank, n: usize) -> i32 {
    (n.min(i32::MAX as usize) as i32).clamp(bank.j_min(), bank.j_max() + 1)
}

/// `(Ṡ_n u0, Ṡ_n B0)`.
pub fn truncate_initial_data(bank: &FilterBank, data: &MhdInitialData, n: i32) -> Result<MhdInitialData> {
    Ok(MhdInitialData {
        u0: bank.low_pass(n, &data.u0)?,
        b0: bank.low_pass(n, &data.b0)?,
    })
}

/// Outcome of the horizon search.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HorizonSelection {
    pub horizon: f64,
    pub steps: usize,
    /// `‖e^{tΔ}u0‖_{L̃¹_T(Ḃ^{d/p+1}_{p,1})} + ‖e^{tΔ}u0‖_{L̃²_T(Ḃ^{d/p}_{p,1})}` at the horizon.
    pub free_norm: f64,
    /// Set when even one step violates the smallness condition; the horizon
    /// is then `dt`.
    pub flagged: bool,
}

/// Free-evolution smallness trace `t_i ↦ ‖e^{tΔ}u0‖_{L̃¹_{t_i}(Ḃ^{d/p+1}_{p,1})} + ‖e^{tΔ}u0‖_{L̃²_{t_i}(Ḃ^{d/p}_{p,1})}`.
fn free_evolution_trace(bank: &FilterBank, u0: &Field, p: f64, times: &[f64]) -> Result<Vec<f64>> {
    let spectral = u0.to_spectral();
    let snapshots = times
        .iter()
        .map(|&t| Ok(heat_semigroup(&spectral, t)?.to_physical()))
        .collect::<Result<Vec<_>>>()?;
    let series = TimeSeriesField::new(times.to_vec(), snapshots)?;
    let norms = series.block_norms(bank, p)?;
    let critical = bank.grid().dim() as f64 / p;
    let l1 = norms.chemin_lerner_trace(critical + 1.0, 1.0, 1.0);
    let l2 = norms.chemin_lerner_trace(critical, 2.0, 1.0);
    Ok(l1.iter().zip(&l2).map(|(a, b)| a + b).collect())
}

/// Largest multiple of `dt` up to `t_max` with
/// `‖e^{tΔ}u0‖_{L̃¹_T(Ḃ^{d/p+1}_{p,1})} + ‖e^{tΔ}u0‖_{L̃²_T(Ḃ^{d/p}_{p,1})} ≤ η²`.
///
/// Both norms are nondecreasing in `T`, so the admissible steps form a
/// prefix of the mesh and a binary search finds its end.
pub fn select_time_horizon(bank: &FilterBank, u0: &Field, p: f64, eta: f64, dt: f64, t_max: f64) -> Result<HorizonSelection> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Parameter(alloc::format!("eta = {eta} must lie in (0, 1)")));
    }
    let max_steps = (t_max / dt * (1.0 + 1e-12)).floor() as usize;
    if max_steps == 0 || !(dt > 0.0) {
        return Err(Error::Parameter(alloc::format!("t_max = {t_max} shorter than dt = {dt}")));
    }
    let times: Vec<f64> = (0..=max_steps).map(|i| i as f64 * dt).collect();
    let trace = free_evolution_trace(bank, u0, p, &times)?;
    let threshold = eta * eta;
    let admissible = trace.partition_point(|v| *v <= threshold);
    let (steps, flagged) = if admissible <= 1 { (1, true) } else { (admissible - 1, false) };
    Ok(HorizonSelection {
        horizon: steps as f64 * dt,
        steps,
        free_norm: trace[steps],
        flagged,
    })
}

/// One iterate `(uⁿ, Bⁿ)` on `[0, T]` together with the fixed data norm.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub n: usize,
    pub horizon: f64,
    pub u: TimeSeriesField,
    pub b: TimeSeriesField,
    /// `E0 = ‖u0‖_{Ḃ^{d/p-1}_{p,1}} + ‖B0‖_{Ḃ^{d/p}_{p,1}}`.
    pub e0: f64,
    pub horizon_selection: Option<HorizonSelection>,
}

impl IterationState {
    /// `Uⁿ(t) = ∫_0^t ‖uⁿ‖_{Ḃ^{d/p+1}_{p,1}}` at every stored time.
    pub fn velocity_integral(&self, bank: &FilterBank, p: f64) -> Result<Vec<f64>> {
        let critical = bank.grid().dim() as f64 / p;
        let norms = self.u.block_norms(bank, p)?.besov_trace(critical + 1.0, 1.0);
        Ok(cumulative_trapezoid(self.u.times(), &norms))
    }
}

fn data_norm(bank: &FilterBank, data: &MhdInitialData, p: f64) -> Result<f64> {
    let critical = bank.grid().dim() as f64 / p;
    Ok(block_norms(bank, &data.u0, p)?.besov(critical - 1.0, 1.0) + block_norms(bank, &data.b0, p)?.besov(critical, 1.0))
}

fn snapshot_times(horizon: f64, dt: f64, cadence: usize) -> Result<Vec<f64>> {
    let steps = step_count(horizon, dt)?;
    Ok(snapshot_steps(steps, cadence).into_iter().map(|i| i as f64 * dt).collect())
}

/// `(u⁰, B⁰) = (e^{tΔ} Ṡ_0 u0, e^{tΔ} Ṡ_0 B0)` on the selected horizon.
pub fn init_iterate(bank: &FilterBank, data: &MhdInitialData, config: &IterationConfig) -> Result<IterationState> {
    let grid = *data.grid();
    if grid != *bank.grid() {
        return Err(Error::GridMismatch);
    }
    config.validate(grid.dim())?;
    let (horizon, selection) = match config.horizon {
        Some(h) => (h, None),
        None => {
            let s = select_time_horizon(bank, &data.u0, config.p, config.eta, config.dt, config.t_max)?;
            (s.horizon, Some(s))
        }
    };
    let times = snapshot_times(horizon, config.dt, config.cadence)?;
    let level0 = truncate_initial_data(bank, data, truncation_level(bank, 0))?;
    let evolve = |f: &Field| -> Result<TimeSeriesField> {
        let spectral = f.to_spectral();
        let snaps = times
            .iter()
            .map(|&t| Ok(heat_semigroup(&spectral, t)?.to_physical()))
            .collect::<Result<Vec<_>>>()?;
        TimeSeriesField::new(times.clone(), snaps)
    };
    Ok(IterationState {
        n: 0,
        horizon,
        u: evolve(&level0.u0)?,
        b: evolve(&level0.b0)?,
        e0: data_norm(bank, data, config.p)?,
        horizon_selection: selection,
    })
}

/// `P div(-u ⊗ u + B ⊗ B)` at one time.
fn velocity_forcing(u: &Field, b: &Field) -> Field {
    let lattice = u.grid().lattice();
    let pu = masked_physical(&u.to_spectral(), &lattice);
    let pb = masked_physical(&b.to_spectral(), &lattice);
    let mut out = tensor_divergence_from_physical(&pb, &pb, &lattice);
    out.axpy_assign(-1.0, &tensor_divergence_from_physical(&pu, &pu, &lattice));
    leray_in_place(&mut out, &lattice);
    out.to_physical()
}

/// `div(u ⊗ B)`, which is `(B·∇)u` for solenoidal `B`.
fn magnetic_source(u: &Field, b: &Field) -> Result<Field> {
    Ok(tensor_divergence_spectral(&u.to_spectral(), &b.to_spectral())?.to_physical())
}

/// Builds `(u^{n+1}, B^{n+1})` from `(uⁿ, Bⁿ)`.
///
/// The transport solve does not preserve `div B = 0` exactly (its source
/// and advection are only solenoidal up to truncation), so the magnetic
/// snapshots are Leray-projected afterwards. The fixed point is unchanged.
pub fn iterate_once(
    bank: &FilterBank,
    state: &IterationState,
    data: &MhdInitialData,
    config: &IterationConfig,
) -> Result<IterationState> {
    let n = state.n + 1;
    let level = truncate_initial_data(bank, data, truncation_level(bank, n))?;
    let times = state.u.times().to_vec();
    let forcing = TimeSeriesField::new(
        times.clone(),
        state
            .u
            .snapshots()
            .iter()
            .zip(state.b.snapshots())
            .map(|(u, b)| velocity_forcing(u, b))
            .collect(),
    )?;
    let source = TimeSeriesField::new(
        times,
        state
            .u
            .snapshots()
            .iter()
            .zip(state.b.snapshots())
            .map(|(u, b)| magnetic_source(u, b))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let heat = HeatProblem::new(level.u0, Some(forcing), state.horizon, config.dt, config.cadence)?;
    let u = solve_heat(&heat)?;
    let transport = TransportProblem::new(
        level.b0,
        state.u.clone(),
        Some(source),
        state.horizon,
        config.dt,
        config.cadence,
    )?;
    let b = solve_transport(&transport)?.map(|f| leray_project(&f.to_spectral()).expect("vector field").to_physical())?;
    Ok(IterationState {
        n,
        horizon: state.horizon,
        u,
        b,
        e0: state.e0,
        horizon_selection: state.horizon_selection.clone(),
    })
}

/// The uniform bounds on one iterate, with `margin = rhs - lhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UniformBounds {
    /// `‖uⁿ‖_{L̃^∞_T(Ḃ^{d/p-1}_{p,1})} + ‖Bⁿ‖_{L̃^∞_T(Ḃ^{d/p}_{p,1})}`.
    pub h1_lhs: f64,
    /// `C0 E0`.
    pub h1_rhs: f64,
    /// `‖uⁿ‖_{L̃¹_T(Ḃ^{d/p+1}_{p,1})} + ‖uⁿ‖_{L̃²_T(Ḃ^{d/p}_{p,1})}`.
    pub h2_lhs: f64,
    /// `η`.
    pub h2_rhs: f64,
}

impl UniformBounds {
    pub fn h1_margin(&self) -> f64 {
        self.h1_rhs - self.h1_lhs
    }

    pub fn h2_margin(&self) -> f64 {
        self.h2_rhs - self.h2_lhs
    }
}

fn bounds_from_norms(u: &SeriesBlockNorms, b: &SeriesBlockNorms, critical: f64, e0: f64, config: &IterationConfig) -> UniformBounds {
    UniformBounds {
        h1_lhs: u.chemin_lerner(critical - 1.0, f64::INFINITY, 1.0) + b.chemin_lerner(critical, f64::INFINITY, 1.0),
        h1_rhs: config.c0 * e0,
        h2_lhs: u.chemin_lerner(critical + 1.0, 1.0, 1.0) + u.chemin_lerner(critical, 2.0, 1.0),
        h2_rhs: config.eta,
    }
}

pub fn check_uniform_bounds(bank: &FilterBank, state: &IterationState, config: &IterationConfig) -> Result<UniformBounds> {
    let critical = config.critical(bank.grid().dim());
    let u = state.u.block_norms(bank, config.p)?;
    let b = state.b.block_norms(bank, config.p)?;
    Ok(bounds_from_norms(&u, &b, critical, state.e0, config))
}

/// `‖u^{n+1} - uⁿ‖_{L̃^∞_T(Ḃ^{d/p-3/2}_{p,1})} + ‖B^{n+1} - Bⁿ‖_{L̃^∞_T(Ḃ^{d/p-1}_{p,1})}`.
fn successive_difference(bank: &FilterBank, next: &IterationState, prev: &IterationState, p: f64) -> Result<f64> {
    let critical = bank.grid().dim() as f64 / p;
    let du = next.u.sub(&prev.u)?.block_norms(bank, p)?;
    let db = next.b.sub(&prev.b)?.block_norms(bank, p)?;
    Ok(du.chemin_lerner(critical - 1.5, f64::INFINITY, 1.0) + db.chemin_lerner(critical - 1.0, f64::INFINITY, 1.0))
}

/// One diagnostics row per iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagnosticsRow {
    pub n: usize,
    pub horizon: f64,
    pub e0: f64,
    pub bounds: UniformBounds,
    /// `Dₙ` between this iterate and the next; `None` for the last one.
    pub d_n: Option<f64>,
}

/// Least-squares fit `log Dₙ ≈ a + n log ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub ratio: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationDiagnostics {
    pub rows: Vec<DiagnosticsRow>,
    /// Index of the iterate at which `Dₙ ≤ tolerance` first held.
    pub converged_at: Option<usize>,
    pub decay: Option<DecayFit>,
    pub final_state: IterationState,
}

impl IterationDiagnostics {
    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }

    pub fn differences(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.d_n).collect()
    }

    /// Whether both margins stayed positive on every iterate.
    pub fn bounds_hold(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.bounds.h1_margin() > 0.0 && r.bounds.h2_margin() > 0.0)
    }
}

/// Relative floor below which differences count as roundoff in the fit.
const FIT_FLOOR: f64 = 1e-12;

/// Geometric fit over `n ≥ 1`, skipping differences at roundoff level.
pub(crate) fn decay_fit(differences: &[f64]) -> Option<DecayFit> {
    let first = *differences.first()?;
    let floor = FIT_FLOOR * first;
    let (xs, ys): (Vec<f64>, Vec<f64>) = differences
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, d)| **d > floor && **d > 0.0)
        .map(|(n, d)| (n as f64, d.ln()))
        .unzip();
    let (slope, _) = linear_fit(&xs, &ys)?;
    Some(DecayFit {
        ratio: slope.exp(),
        points: xs.len(),
    })
}

pub fn run_iteration(bank: &FilterBank, data: &MhdInitialData, config: &IterationConfig) -> Result<IterationDiagnostics> {
    run_iteration_with(bank, data, config, |_| {})
}

/// As [`run_iteration`], calling `on_row` as soon as each row is complete.
pub fn run_iteration_with<F: FnMut(&DiagnosticsRow)>(
    bank: &FilterBank,
    data: &MhdInitialData,
    config: &IterationConfig,
    mut on_row: F,
) -> Result<IterationDiagnostics> {
    let mut state = init_iterate(bank, data, config)?;
    let mut rows = Vec::new();
    let mut converged_at = None;
    for _ in 0..config.max_iterations {
        let next = iterate_once(bank, &state, data, config)?;
        let d_n = successive_difference(bank, &next, &state, config.p)?;
        let row = DiagnosticsRow {
            n: state.n,
            horizon: state.horizon,
            e0: state.e0,
            bounds: check_uniform_bounds(bank, &state, config)?,
            d_n: Some(d_n),
        };
        on_row(&row);
        rows.push(row);
        state = next;
        if d_n <= config.tolerance {
            converged_at = Some(state.n);
            break;
        }
    }
    let last = DiagnosticsRow {
        n: state.n,
        horizon: state.horizon,
        e0: state.e0,
        bounds: check_uniform_bounds(bank, &state, config)?,
        d_n: None,
    };
    on_row(&last);
    rows.push(last);
    let differences: Vec<f64> = rows.iter().filter_map(|r| r.d_n).collect();
    Ok(IterationDiagnostics {
        rows,
        converged_at,
        decay: decay_fit(&differences),
        final_state: state,
    })
}

/// Residual norms of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualRow {
    pub t: f64,
    /// `‖∂_t u - Δu + P((u·∇)u - (B·∇)B)‖_{L²}`.
    pub velocity: f64,
    /// `‖∂_t B + (u·∇)B - (B·∇)u‖_{L²}`.
    pub magnetic: f64,
}

/// Second-order finite difference in time at snapshot `i` of a uniform mesh.
fn time_derivative(series: &TimeSeriesField, i: usize) -> Result<Field> {
    let s = series.snapshots();
    let t = series.times();
    let n = s.len();
    if n < 3 {
        return Err(Error::Series("need at least three snapshots".into()));
    }
    let h = t[1] - t[0];
    let combo = |w: [f64; 3], idx: [usize; 3]| -> Result<Field> {
        s[idx[0]].scaled(w[0] / h).axpy(w[1] / h, &s[idx[1]])?.axpy(w[2] / h, &s[idx[2]])
    };
    if i == 0 {
        combo([-1.5, 2.0, -0.5], [0, 1, 2])
    } else if i == n - 1 {
        combo([0.5, -2.0, 1.5], [n - 3, n - 2, n - 1])
    } else {
        combo([-0.5, 0.0, 0.5], [i - 1, i, i + 1])
    }
}

/// Residual of the MHD system in advective form, with time derivatives by
/// finite differences across snapshots (uniform mesh required).
pub fn equation_residual(u: &TimeSeriesField, b: &TimeSeriesField) -> Result<Vec<ResidualRow>> {
    let times = u.times();
    if b.times() != times {
        return Err(Error::Series("u and B meshes differ".into()));
    }
    let h = times.get(1).map(|t| t - times[0]).unwrap_or(0.0);
    if times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::Series("residual needs a uniform mesh".into()));
    }
    let lattice = u.first().grid().lattice();
    (0..times.len())
        .map(|i| {
            let ui = &u.snapshots()[i];
            let bi = &b.snapshots()[i];
            let mut lap = ui.to_spectral();
            let k2: Vec<f64> = lattice.k2.iter().map(|k| -k).collect();
            lap.apply_weights_in_place(&k2);
            let mut nonlinear: SpectralField = advection(ui, ui)?.sub(&advection(bi, bi)?)?.to_spectral();
            leray_in_place(&mut nonlinear, &lattice);
            let ru = time_derivative(u, i)?
                .sub(&lap.to_physical())?
                .add(&nonlinear.to_physical())?;
            let rb = time_derivative(b, i)?
                .add(&advection(ui, bi)?)?
                .sub(&advection(bi, ui)?)?;
            Ok(ResidualRow {
                t: times[i],
                velocity: lp_norm_unchecked(&ru, 2.0),
                magnetic: lp_norm_unchecked(&rb, 2.0),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::spectral::lp_norm;

    fn setup(n: usize) -> (FilterBank, IterationConfig) {
        let g = FrequencyGrid::periodic(2, n).unwrap();
        (FilterBank::resolved(g).unwrap(), IterationConfig::default())
    }

    #[test]
    fn truncation_levels() {
        let (bank, _) = setup(32);
        assert_eq!(truncation_level(&bank, 0), 0);
        assert_eq!(truncation_level(&bank, 50), bank.j_max() + 1);
        let data = MhdInitialData::taylor_green(*bank.grid(), 0.05);
        let full = truncate_initial_data(&bank, &data, bank.j_max() + 1).unwrap();
        assert!(lp_norm(&full.u0.sub(&data.u0).unwrap(), 2.0).unwrap() < 1e-15);
        let none = truncate_initial_data(&bank, &data, bank.j_min()).unwrap();
        assert!(lp_norm(&none.b0, 2.0).unwrap() < 1e-16);
    }

    #[test]
    fn zero_data_converges_immediately() {
        let (bank, config) = setup(32);
        let data = MhdInitialData::zeros(*bank.grid());
        let diag = run_iteration(&bank, &data, &config).unwrap();
        assert_eq!(diag.converged_at, Some(1));
        assert_eq!(diag.rows.len(), 2);
        assert_eq!(diag.rows[0].d_n, Some(0.0));
        assert_eq!(diag.final_state.horizon, config.t_max);
        let b = diag.rows[0].bounds;
        assert_eq!((b.h1_margin(), b.h2_margin()), (0.0, config.eta));
    }

    #[test]
    fn zero_iterations_gives_one_row() {
        let (bank, config) = setup(32);
        let data = MhdInitialData::taylor_green(*bank.grid(), 0.05);
        let config = IterationConfig { max_iterations: 0, ..config };
        let diag = run_iteration(&bank, &data, &config).unwrap();
        assert_eq!(diag.rows.len(), 1);
        assert_eq!(diag.rows[0].d_n, None);
        assert!(!diag.converged());
    }

    #[test]
    fn horizon_for_single_mode_matches_closed_form() {
        // u0 = a (0, sin 4 x0) is solenoidal with |k| = 4, split between j = 1 and j = 2.
        let (bank, _) = setup(32);
        let a = 0.02;
        let u0 = Field::from_fn(*bank.grid(), 2, |x, o| {
            o[0] = 0.0;
            o[1] = a * (4.0 * x[0]).sin();
        });
        let dt = 1e-3;
        let eta = 0.1;
        let sel = select_time_horizon(&bank, &u0, 2.0, eta, dt, 0.5).unwrap();
        // Block weights at |k| = 4: φ(2) at j = 1 and φ(1) at j = 2, summing to 1.
        use crate::littlewood_paley::dyadic_profile;
        let amp = a / 2f64.sqrt();
        let weight = |s: f64| dyadic_profile(2.0) * 2f64.powf(s) + dyadic_profile(1.0) * 2f64.powf(2.0 * s);
        let closed = |t: f64| {
            amp * weight(2.0) * (1.0 - (-16.0 * t).exp()) / 16.0
                + amp * weight(1.0) * ((1.0 - (-32.0 * t).exp()) / 32.0).sqrt()
        };
        // Analytic threshold by bisection on the closed form.
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if closed(mid) <= eta * eta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(!sel.flagged);
        assert!((sel.horizon - lo).abs() <= 2.0 * dt, "{} vs {lo}", sel.horizon);
        let zero = select_time_horizon(&bank, &Field::zeros(*bank.grid(), 2), 2.0, eta, dt, 0.5).unwrap();
        assert_eq!(zero.horizon, 0.5);
        let huge = select_time_horizon(&bank, &u0.scaled(1e3), 2.0, eta, dt, 0.5).unwrap();
        assert!(huge.flagged && huge.horizon == dt);
    }

    #[test]
    fn sign_symmetry_in_b() {
        let (bank, config) = setup(32);
        let data = MhdInitialData::taylor_green(*bank.grid(), 0.05);
        let flipped = MhdInitialData {
            u0: data.u0.clone(),
            b0: data.b0.scaled(-1.0),
        };
        let config = IterationConfig { max_iterations: 3, dt: 1e-2, ..config };
        let a = run_iteration(&bank, &data, &config).unwrap().final_state;
        let b = run_iteration(&bank, &flipped, &config).unwrap().final_state;
        assert_eq!(a.u, b.u);
        assert_eq!(a.b, b.b.map(|f| f.scaled(-1.0)).unwrap());
    }

    #[test]
    fn decay_fit_skips_roundoff() {
        let d = [1.0, 0.1, 0.01, 0.001, 1e-15];
        let fit = decay_fit(&d).unwrap();
        assert!((fit.ratio - 0.1).abs() < 1e-12);
        assert_eq!(fit.points, 3);
        assert!(decay_fit(&[1.0, 0.0]).is_none());
    }

    #[test]
    fn free_evolution_bounds_at_level_zero() {
        let (bank, config) = setup(32);
        let data = MhdInitialData::taylor_green(*bank.grid(), 0.05);
        let state = init_iterate(&bank, &data, &config).unwrap();
        let b = check_uniform_bounds(&bank, &state, &config).unwrap();
        assert!(b.h2_lhs <= config.eta * config.eta + 1e-12);
        assert!(b.h2_margin() > 0.0 && b.h1_margin() > 0.0);
        let expected = data_norm(&bank, &data, 2.0).unwrap();
        assert_eq!(state.e0, expected);
    }
}
