//! Seeded verification suites for the harmonic-analysis checkers and the
//! linear solvers. Each suite returns named checks with their measured value
//! and limit; the corpus is processed in parallel.

use std::path::Path;

use lpmhd_core::littlewood_paley::{bernstein_ratios, BernsteinReport, BernsteinWindow, SupportShape};
use lpmhd_core::paraproduct::{
    bony_decomposition, log_interpolation_ratio, product_law_ratio, remainder, spread, ProductVariant,
};
use lpmhd_core::random::{random_band_limited, random_solenoidal, seeded};
use lpmhd_core::solvers::{
    heat_estimate_report, solve_heat, solve_transport, transport_estimate_report, HeatProblem, TransportProblem,
};
use lpmhd_core::spectral::{dealiased_product_physical, heat_semigroup, lp_norm};
use lpmhd_core::stats::median;
use lpmhd_core::{Complex64, EstimateReport, Field, FilterBank, TimeSeriesField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::format::write_json;
use crate::report::write_estimates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Bernstein,
    Bony,
    Products,
    Loginterp,
    Heat,
    Transport,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Bernstein,
        Suite::Bony,
        Suite::Products,
        Suite::Loginterp,
        Suite::Heat,
        Suite::Transport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bernstein => "bernstein",
            Suite::Bony => "bony",
            Suite::Products => "products",
            Suite::Loginterp => "loginterp",
            Suite::Heat => "heat",
            Suite::Transport => "transport",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// One assertion: passes when `value` is on the right side of `limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "lpmhd_core::serde_float")]
    pub value: f64,
    #[serde(with = "lpmhd_core::serde_float")]
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: value >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub estimates: Vec<(EstimateReport, u64)>,
    #[serde(skip)]
    pub bernstein: Vec<(BernsteinReport, u64)>,
}

impl SuiteReport {
    fn new(suite: Suite, config: &RunConfig) -> Self {
        Self {
            suite,
            seed: config.seed,
            samples: config.samples,
            checks: Vec::new(),
            estimates: Vec::new(),
            bernstein: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Writes `verify_<suite>.json` and, when there are estimate rows,
    /// `verify_<suite>_estimates.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(format!("verify_{}.json", self.suite.name())), self)?;
        if !self.estimates.is_empty() {
            write_estimates(&dir.join(format!("verify_{}_estimates.csv", self.suite.name())), &self.estimates)?;
        }
        Ok(())
    }
}

/// Seed of corpus sample `i`.
pub fn sample_seed(base: u64, i: usize) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add(i as u64)
}

fn seeds(config: &RunConfig) -> Vec<u64> {
    (0..config.samples).map(|i| sample_seed(config.seed, i)).collect()
}

fn l2(f: &Field) -> f64 {
    lp_norm(f, 2.0).expect("p = 2")
}

pub fn run_suite(suite: Suite, config: &RunConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Bernstein => bernstein_suite(config, &BernsteinBaseline::committed()),
        Suite::Bony => bony_suite(config),
        Suite::Products => products_suite(config),
        Suite::Loginterp => loginterp_suite(config),
        Suite::Heat => heat_suite(config),
        Suite::Transport => transport_suite(config, &TransportBaseline::committed()),
    }
}

// --- Bernstein -----------------------------------------------------------

/// Relative tolerance for corpus medians against their committed baseline.
pub const BASELINE_TOLERANCE: f64 = 0.1;

/// Slack applied to the measured extremes when a window is recorded.
const WINDOW_SLACK: f64 = 1.25;

/// Dyadic scale of the test rings and balls.
const BERNSTEIN_LAMBDA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinCase {
    pub shape: SupportShape,
    pub order: u32,
    #[serde(with = "lpmhd_core::serde_float")]
    pub p: f64,
    #[serde(with = "lpmhd_core::serde_float")]
    pub q: f64,
}

impl BernsteinCase {
    fn label(&self) -> String {
        let shape = match self.shape {
            SupportShape::Ball => "ball",
            SupportShape::Ring => "ring",
        };
        format!("{shape} k={} p={} q={}", self.order, self.p, self.q)
    }
}

pub const BERNSTEIN_CASES: [BernsteinCase; 7] = [
    BernsteinCase { shape: SupportShape::Ring, order: 1, p: 2.0, q: 2.0 },
    BernsteinCase { shape: SupportShape::Ring, order: 2, p: 2.0, q: 2.0 },
    BernsteinCase { shape: SupportShape::Ring, order: 1, p: 2.0, q: f64::INFINITY },
    BernsteinCase { shape: SupportShape::Ring, order: 1, p: 1.0, q: 2.0 },
    BernsteinCase { shape: SupportShape::Ring, order: 1, p: f64::INFINITY, q: f64::INFINITY },
    BernsteinCase { shape: SupportShape::Ball, order: 1, p: 2.0, q: 2.0 },
    BernsteinCase { shape: SupportShape::Ball, order: 0, p: 2.0, q: f64::INFINITY },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinBaselineEntry {
    pub case: BernsteinCase,
    pub upper_median: f64,
    pub lower_median: Option<f64>,
    pub window: BernsteinWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinBaseline {
    pub points: usize,
    pub lambda: f64,
    pub seed: u64,
    pub samples: usize,
    pub entries: Vec<BernsteinBaselineEntry>,
}

impl BernsteinBaseline {
    pub fn committed() -> Self {
        serde_json::from_str(include_str!("../baselines/bernstein.json")).expect("committed baseline parses")
    }
}

fn bernstein_field(bank: &FilterBank, shape: SupportShape, seed: u64) -> Field {
    let (lo, hi) = shape.radii(BERNSTEIN_LAMBDA * bank.grid().fundamental());
    random_band_limited(bank.grid(), 1, lo, hi, &mut seeded(seed))
}

fn bernstein_corpus(config: &RunConfig, case: &BernsteinCase, window: Option<BernsteinWindow>) -> Result<Vec<(BernsteinReport, u64)>> {
    let bank = config.bank()?;
    let lambda = BERNSTEIN_LAMBDA * bank.grid().fundamental();
    seeds(config)
        .into_par_iter()
        .map(|seed| {
            let f = bernstein_field(&bank, case.shape, seed);
            Ok((bernstein_ratios(&f, case.shape, lambda, case.order, case.p, case.q, window)?, seed))
        })
        .collect()
}

/// Measures a fresh baseline on the configured corpus.
pub fn record_bernstein_baseline(config: &RunConfig) -> Result<BernsteinBaseline> {
    let entries = BERNSTEIN_CASES
        .iter()
        .map(|case| {
            let corpus = bernstein_corpus(config, case, None)?;
            let uppers: Vec<f64> = corpus.iter().map(|(r, _)| r.upper_ratio).collect();
            let lowers: Vec<f64> = corpus.iter().filter_map(|(r, _)| r.lower_ratio).collect();
            let upper_max = uppers.iter().cloned().fold(0.0, f64::max) * WINDOW_SLACK;
            let lower_min = if lowers.is_empty() {
                0.0
            } else {
                lowers.iter().cloned().fold(f64::INFINITY, f64::min) / WINDOW_SLACK
            };
            Ok(BernsteinBaselineEntry {
                case: *case,
                upper_median: median(&uppers).unwrap_or(0.0),
                lower_median: median(&lowers),
                window: BernsteinWindow { lower_min, upper_max },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BernsteinBaseline {
        points: config.points,
        lambda: BERNSTEIN_LAMBDA,
        seed: config.seed,
        samples: config.samples,
        entries,
    })
}

fn relative_gap(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        (value - reference).abs() / reference.abs()
    }
}

pub fn bernstein_suite(config: &RunConfig, baseline: &BernsteinBaseline) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(Suite::Bernstein, config);
    if baseline.points != config.points || config.dimension != 2 {
        return Err(Error::Config(format!(
            "the committed Bernstein baseline is for d = 2, N = {}",
            baseline.points
        )));
    }
    for entry in &baseline.entries {
        let case = &entry.case;
        let label = case.label();
        let corpus = bernstein_corpus(config, case, Some(entry.window))?;
        let outside = corpus.iter().filter(|(r, _)| r.within_window != Some(true)).count();
        report
            .checks
            .push(Check::at_most(format!("{label}: samples outside window"), outside as f64, 0.0));
        let uppers: Vec<f64> = corpus.iter().map(|(r, _)| r.upper_ratio).collect();
        let upper = median(&uppers).unwrap_or(f64::NAN);
        report.checks.push(Check::at_most(
            format!("{label}: upper median drift"),
            relative_gap(upper, entry.upper_median),
            BASELINE_TOLERANCE,
        ));
        if let Some(reference) = entry.lower_median {
            let lowers: Vec<f64> = corpus.iter().filter_map(|(r, _)| r.lower_ratio).collect();
            let lower = median(&lowers).unwrap_or(f64::NAN);
            report.checks.push(Check::at_most(
                format!("{label}: lower median drift"),
                relative_gap(lower, reference),
                BASELINE_TOLERANCE,
            ));
        }
        report.bernstein.extend(corpus);
    }
    Ok(report)
}

// --- Bony ----------------------------------------------------------------

fn exact_band_pair(bank: &FilterBank, seed: u64) -> (Field, Field) {
    let (lo, hi) = bank.exact_band();
    let mut rng = seeded(seed);
    let u = random_band_limited(bank.grid(), 1, lo, hi, &mut rng);
    let v = random_band_limited(bank.grid(), 1, lo, hi, &mut rng);
    (u, v)
}

pub fn bony_suite(config: &RunConfig) -> Result<SuiteReport> {
    let bank = config.bank()?;
    let mut report = SuiteReport::new(Suite::Bony, config);
    let results = seeds(config)
        .into_par_iter()
        .map(|seed| {
            let (u, v) = exact_band_pair(&bank, seed);
            let parts = bony_decomposition(&bank, &u, &v)?;
            let exact = dealiased_product_physical(&u, &v)?;
            let residual = l2(&parts.reconstruct().sub(&exact)?) / (l2(&u) * l2(&v));
            let symmetric = remainder(&bank, &u, &v)? == remainder(&bank, &v, &u)?;
            Ok((residual, symmetric))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let asymmetric = results.iter().filter(|r| !r.1).count();
    report
        .checks
        .push(Check::at_most("reconstruction residual / (|u| |v|)", worst, 1e-10));
    report
        .checks
        .push(Check::at_most("asymmetric remainders", asymmetric as f64, 0.0));
    Ok(report)
}

// --- Products ------------------------------------------------------------

/// Default regularity pair, admissible for every variant when `d/p ≥ 1/2`.
const DEFAULT_INDEX: f64 = 0.5;

/// Largest accepted `max / median` of a corpus of ratios.
pub const SPREAD_LIMIT: f64 = 10.0;

pub fn products_suite(config: &RunConfig) -> Result<SuiteReport> {
    let bank = config.bank()?;
    let d = config.dimension;
    let (s1, s2) = (config.s1.unwrap_or(DEFAULT_INDEX), config.s2.unwrap_or(DEFAULT_INDEX));
    for variant in ProductVariant::ALL {
        variant.check_indices(d, config.p, s1, s2)?;
    }
    let mut report = SuiteReport::new(Suite::Products, config);
    let (lo, hi) = bank.exact_band();
    for variant in ProductVariant::ALL {
        let corpus = seeds(config)
            .into_par_iter()
            .map(|seed| {
                let mut rng = seeded(seed);
                let f = random_band_limited(bank.grid(), 1, lo, hi, &mut rng);
                let g = random_band_limited(bank.grid(), 1, lo, hi, &mut rng);
                Ok((product_law_ratio(&bank, &f, &g, s1, s2, config.p, variant)?, seed))
            })
            .collect::<Result<Vec<_>>>()?;
        let name = variant.name();
        let bad = corpus.iter().filter(|(r, _)| !r.ratio.is_finite() || r.degenerate).count();
        report.checks.push(Check::at_most(format!("{name}: non-finite ratios"), bad as f64, 0.0));
        let ratios: Vec<f64> = corpus.iter().map(|(r, _)| r.ratio).collect();
        let spread = spread(&ratios).unwrap_or(f64::INFINITY);
        report
            .checks
            .push(Check::at_most(format!("{name}: max / median"), spread, SPREAD_LIMIT));
        report.estimates.extend(corpus);
    }
    Ok(report)
}

// --- Logarithmic interpolation --------------------------------------------

const LOGINTERP_EPSILON: f64 = 0.5;

pub fn loginterp_suite(config: &RunConfig) -> Result<SuiteReport> {
    let bank = config.bank()?;
    let s = config.dimension as f64 / config.p;
    let (lo, hi) = bank.exact_band();
    let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.01).collect();
    let mut report = SuiteReport::new(Suite::Loginterp, config);
    let corpus = seeds(config)
        .into_par_iter()
        .map(|seed| {
            let f = random_band_limited(bank.grid(), 1, lo, hi, &mut seeded(seed)).to_spectral();
            let snaps = times
                .iter()
                .map(|&t| Ok(heat_semigroup(&f, t)?.to_physical()))
                .collect::<Result<Vec<_>>>()?;
            let series = TimeSeriesField::new(times.clone(), snaps)?;
            Ok((log_interpolation_ratio(&bank, &series, s, config.p, 1.0, LOGINTERP_EPSILON)?, seed))
        })
        .collect::<Result<Vec<_>>>()?;
    let bad = corpus
        .iter()
        .filter(|(r, _)| !r.degenerate && !r.ratio.is_finite())
        .count();
    report
        .checks
        .push(Check::at_most("non-finite ratios on non-degenerate samples", bad as f64, 0.0));
    report.estimates.extend(corpus);
    Ok(report)
}

// --- Heat ----------------------------------------------------------------

/// Step-halving order of a forced heat problem on `dt, dt/2, dt/4`.
pub fn heat_self_convergence(bank: &FilterBank, seed: u64) -> Result<f64> {
    let g = *bank.grid();
    let base = random_band_limited(&g, 1, 1.0, 5.0, &mut seeded(seed));
    let t_end = 0.5;
    let times: Vec<f64> = (0..=2000).map(|i| t_end * i as f64 / 2000.0).collect();
    let snaps = times.iter().map(|t| base.scaled((20.0 * t).sin())).collect();
    let forcing = TimeSeriesField::new(times, snaps)?;
    let run = |dt: f64| -> Result<Field> {
        let p = HeatProblem::new(Field::zeros(g, 1), Some(forcing.clone()), t_end, dt, usize::MAX)?;
        Ok(solve_heat(&p)?.last().clone())
    };
    let (a, b, c) = (run(0.05)?, run(0.025)?, run(0.0125)?);
    Ok((l2(&a.sub(&b)?) / l2(&b.sub(&c)?)).log2())
}

pub fn heat_suite(config: &RunConfig) -> Result<SuiteReport> {
    let bank = config.bank()?;
    let g = *bank.grid();
    let mut report = SuiteReport::new(Suite::Heat, config);

    // Single mode cos(3x0 + 4x1) in fundamental units decays like e^{-25 k0² t}.
    let k0 = g.fundamental();
    let u0 = Field::from_fn(g, 1, |x, o| o[0] = (k0 * (3.0 * x[0] + 4.0 * x[1])).cos());
    let horizon = 0.2;
    let problem = HeatProblem::new(u0.clone(), None, horizon, 0.01, 1)?;
    let sol = solve_heat(&problem)?;
    let worst = sol
        .times()
        .iter()
        .zip(sol.snapshots())
        .map(|(t, snap)| {
            let exact = u0.scaled((-25.0 * k0 * k0 * t).exp());
            snap.sub(&exact).map(|e| e.max_magnitude())
        })
        .collect::<lpmhd_core::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.checks.push(Check::at_most("single-mode decay error", worst, 1e-13));

    let order = heat_self_convergence(&bank, config.seed)?;
    report.checks.push(Check::at_least("ETD2 self-convergence order", order, 2.0));

    let s = config.dimension as f64 / config.p - 1.0;
    let drift = seeds(config)
        .into_par_iter()
        .map(|seed| {
            let u0 = random_band_limited(&g, 1, 1.0, 10.0, &mut seeded(seed));
            let ratio = |f: Field| -> Result<EstimateReport> {
                let p = HeatProblem::new(f, None, 0.1, 0.01, 1)?;
                let sol = solve_heat(&p)?;
                Ok(heat_estimate_report(&bank, &p, &sol, 1.0, 1.0, s, config.p, 1.0)?)
            };
            let a = ratio(u0.clone())?;
            let b = ratio(u0.scaled(10.0))?;
            Ok((relative_gap(b.ratio, a.ratio), (a, seed)))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = drift.iter().map(|d| d.0).fold(0.0, f64::max);
    report
        .checks
        .push(Check::at_most("estimate ratio change under u0 -> 10 u0", worst, 1e-12));
    report.estimates.extend(drift.into_iter().map(|d| d.1));
    Ok(report)
}

// --- Transport -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportBaseline {
    pub points: usize,
    pub seed: u64,
    pub samples: usize,
    /// Median over the corpus of the smallest admissible constant.
    pub constant_median: f64,
}

impl TransportBaseline {
    pub fn committed() -> Self {
        serde_json::from_str(include_str!("../baselines/transport.json")).expect("committed baseline parses")
    }
}

fn steady(v: Field, t: f64) -> Result<TimeSeriesField> {
    Ok(TimeSeriesField::constant(v, vec![0.0, t])?)
}

/// Relative L² error of a constant-velocity translation against the
/// phase-shift oracle.
pub fn translation_error(bank: &FilterBank, seed: u64) -> Result<f64> {
    let g = *bank.grid();
    let c = [0.7, -0.4];
    let k0 = g.fundamental();
    let f0 = random_band_limited(&g, 1, k0, 6.0 * k0, &mut seeded(seed));
    let v = Field::from_fn(g, 2, |_, o| o.copy_from_slice(&c));
    let t_end = 0.5;
    let problem = TransportProblem::new(f0.clone(), steady(v, t_end)?, None, t_end, 0.005, usize::MAX)?;
    let sol = solve_transport(&problem)?;
    let lattice = g.lattice();
    let mut exact = f0.to_spectral();
    for (flat, z) in exact.coefficients_mut().iter_mut().enumerate() {
        let k = lattice.k[flat];
        let phase = -(k[0] * c[0] + k[1] * c[1]) * t_end;
        *z *= Complex64::new(phase.cos(), phase.sin());
    }
    Ok(l2(&sol.last().sub(&exact.to_physical())?) / l2(&f0))
}

/// Relative L² drift and the relative extremum overshoot of a scalar
/// advected by the shear `v = (sin x1, 0)` over `T = 1`.
pub fn shear_drift(bank: &FilterBank) -> Result<(f64, f64)> {
    let g = *bank.grid();
    let k0 = g.fundamental();
    let v = Field::from_fn(g, 2, |x, o| {
        o[0] = (k0 * x[1]).sin();
        o[1] = 0.0;
    });
    let f0 = Field::from_fn(g, 1, |x, o| {
        o[0] = (k0 * x[0]).cos() * (k0 * x[1]).sin() + 0.5 * (2.0 * k0 * x[0]).sin()
    });
    let problem = TransportProblem::new(f0.clone(), steady(v, 1.0)?, None, 1.0, 0.02, 1)?;
    let sol = solve_transport(&problem)?;
    let n0 = l2(&f0);
    let drift = sol
        .snapshots()
        .iter()
        .map(|s| (l2(s) - n0).abs() / n0)
        .fold(0.0, f64::max);
    let (lo, hi) = extremes(&f0);
    let overshoot = sol
        .snapshots()
        .iter()
        .map(|s| {
            let (a, b) = extremes(s);
            (lo - a).max(b - hi).max(0.0)
        })
        .fold(0.0, f64::max)
        / (hi - lo);
    Ok((drift, overshoot))
}

fn extremes(f: &Field) -> (f64, f64) {
    f.samples()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
}

fn transport_constants(config: &RunConfig, bank: &FilterBank) -> Result<Vec<(EstimateReport, u64)>> {
    let g = *bank.grid();
    let k0 = g.fundamental();
    let s = config.dimension as f64 / config.p - 1.0;
    seeds(config)
        .into_par_iter()
        .map(|seed| {
            let mut rng = seeded(seed);
            let velocity = lpmhd_core::random::normalized(&random_solenoidal(&g, k0, 3.0 * k0, &mut rng), 0.5);
            let f0 = random_band_limited(&g, 1, k0, 8.0 * k0, &mut rng);
            let problem = TransportProblem::new(f0, steady(velocity, 0.5)?, None, 0.5, 0.01, 1)?;
            let sol = solve_transport(&problem)?;
            let (report, _) = transport_estimate_report(bank, &problem, &sol, s, config.p, 1.0)?;
            Ok((report, seed))
        })
        .collect()
}

fn constant_of(report: &EstimateReport) -> f64 {
    report.index("C_min").expect("transport report names its constant")
}

pub fn record_transport_baseline(config: &RunConfig) -> Result<TransportBaseline> {
    let bank = config.bank()?;
    let corpus = transport_constants(config, &bank)?;
    let constants: Vec<f64> = corpus.iter().map(|(r, _)| constant_of(r)).collect();
    Ok(TransportBaseline {
        points: config.points,
        seed: config.seed,
        samples: config.samples,
        constant_median: median(&constants).unwrap_or(0.0),
    })
}

pub fn transport_suite(config: &RunConfig, baseline: &TransportBaseline) -> Result<SuiteReport> {
    let bank = config.bank()?;
    if config.dimension != 2 {
        return Err(Error::Config("the transport suite is two-dimensional".into()));
    }
    let mut report = SuiteReport::new(Suite::Transport, config);
    report
        .checks
        .push(Check::at_most("translation error (relative L2)", translation_error(&bank, config.seed)?, 1e-8));
    let (drift, overshoot) = shear_drift(&bank)?;
    report.checks.push(Check::at_most("shear L2 drift over T = 1", drift, 1e-6));
    report.checks.push(Check::at_most("shear extremum overshoot", overshoot, 1e-3));
    if baseline.points != config.points {
        return Err(Error::Config(format!(
            "the committed transport baseline is for N = {}",
            baseline.points
        )));
    }
    let corpus = transport_constants(config, &bank)?;
    let constants: Vec<f64> = corpus.iter().map(|(r, _)| constant_of(r)).collect();
    let infinite = constants.iter().filter(|c| !c.is_finite()).count();
    report
        .checks
        .push(Check::at_most("infinite estimate constants", infinite as f64, 0.0));
    let med = median(&constants).unwrap_or(f64::NAN);
    report.checks.push(Check::at_most(
        "constant median drift",
        relative_gap(med, baseline.constant_median),
        BASELINE_TOLERANCE,
    ));
    report.estimates.extend(corpus);
    Ok(report)
}
