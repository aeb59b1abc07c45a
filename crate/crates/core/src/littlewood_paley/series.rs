use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use super::{block_norms, lr_aggregate, BesovSpec, BlockNorms, FilterBank};
use crate::field::Field;
use crate::stats::trapezoid_weights;
use crate::{Error, Result};

/// Snapshots `f(t_i)` on `0 = t_0 < t_1 < ... < t_n = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesField {
    times: Vec<f64>,
    snapshots: Vec<Field>,
}

impl TimeSeriesField {
    pub fn new(times: Vec<f64>, snapshots: Vec<Field>) -> Result<Self> {
        if times.is_empty() || snapshots.is_empty() {
            return Err(Error::EmptySeries);
        }
        if times.len() != snapshots.len() {
            return Err(Error::Series("times and snapshots differ in length".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::Series("series must start at t = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Series("times must be strictly increasing".into()));
        }
        let first = &snapshots[0];
        for s in &snapshots[1..] {
            first.ensure_compatible(s)?;
        }
        Ok(Self { times, snapshots })
    }

    /// A series holding `field` unchanged at every listed time.
    pub fn constant(field: Field, times: Vec<f64>) -> Result<Self> {
        let snapshots = times.iter().map(|_| field.clone()).collect();
        Self::new(times, snapshots)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Field] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn first(&self) -> &Field {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("nonempty")
    }

    /// Whether the series spans `[0, horizon]` up to a relative slack.
    pub fn covers(&self, horizon: f64) -> bool {
        self.horizon() >= horizon * (1.0 - 1e-12) - 1e-14
    }

    /// Index `i` and weight `w` with `f(t) ≈ (1 - w) f(t_i) + w f(t_{i+1})`.
    pub fn bracket(&self, t: f64) -> (usize, f64) {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return (0, 0.0);
        }
        if t >= self.times[n - 1] {
            return (n - 2, 1.0);
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        (i, w)
    }

    /// Piecewise-linear interpolation in time, clamped at the ends.
    pub fn interpolate(&self, t: f64) -> Field {
        let (i, w) = self.bracket(t);
        if w == 0.0 {
            return self.snapshots[i].clone();
        }
        if w == 1.0 {
            return self.snapshots[i + 1].clone();
        }
        self.snapshots[i]
            .scaled(1.0 - w)
            .axpy(w, &self.snapshots[i + 1])
            .expect("compatible snapshots")
    }

    /// Pointwise map over snapshots.
    pub fn map<F: FnMut(&Field) -> Field>(&self, f: F) -> Result<Self> {
        Self::new(self.times.clone(), self.snapshots.iter().map(f).collect())
    }

    pub fn sub(&self, other: &TimeSeriesField) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::Series("time meshes differ".into()));
        }
        let snaps = self
            .snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.times.clone(), snaps)
    }

    /// The first `count` snapshots.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        Self::new(
            self.times[..count].to_vec(),
            self.snapshots[..count].to_vec(),
        )
    }

    pub fn block_norms(&self, bank: &FilterBank, p: f64) -> Result<SeriesBlockNorms> {
        let per_snapshot = self
            .snapshots
            .iter()
            .map(|s| block_norms(bank, s, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesBlockNorms {
            times: self.times.clone(),
            per_snapshot,
        })
    }
}

/// `(∫ g^q)^{1/q}` by the trapezoid rule on `times`; `q = ∞` is the max.
pub fn time_norm(times: &[f64], values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let weights = trapezoid_weights(times);
    let total: f64 = weights
        .iter()
        .zip(values)
        .map(|(w, v)| if q == 1.0 { w * v } else { w * v.powf(q) })
        .sum();
    if q == 1.0 {
        total
    } else {
        total.powf(1.0 / q)
    }
}

/// Block norms of every snapshot; the common input of all time-dependent
/// Besov-type norms of one series at one Lebesgue exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesBlockNorms {
    pub times: Vec<f64>,
    pub per_snapshot: Vec<BlockNorms>,
}

impl SeriesBlockNorms {
    pub fn j_min(&self) -> i32 {
        self.per_snapshot[0].j_min
    }

    pub fn num_blocks(&self) -> usize {
        self.per_snapshot[0].norms.len()
    }

    fn block_trace(&self, b: usize, count: usize) -> Vec<f64> {
        self.per_snapshot[..count].iter().map(|n| n.norms[b]).collect()
    }

    fn weight(&self, b: usize, s: f64) -> f64 {
        2f64.powf((self.j_min() + b as i32) as f64 * s)
    }

    /// `‖f‖_{L̃^q_T(Ḃ^s_{p,r})}` over the first `count` snapshots.
    pub fn chemin_lerner_prefix(&self, count: usize, s: f64, q: f64, r: f64) -> f64 {
        let times = &self.times[..count];
        lr_aggregate(
            (0..self.num_blocks())
                .map(|b| self.weight(b, s) * time_norm(times, &self.block_trace(b, count), q)),
            r,
        )
    }

    pub fn chemin_lerner(&self, s: f64, q: f64, r: f64) -> f64 {
        self.chemin_lerner_prefix(self.times.len(), s, q, r)
    }

    /// `t_i ↦ ‖f‖_{L̃^q_{t_i}(Ḃ^s_{p,r})}` for every snapshot time.
    pub fn chemin_lerner_trace(&self, s: f64, q: f64, r: f64) -> Vec<f64> {
        let n = self.times.len();
        let nb = self.num_blocks();
        // Running per-block accumulators, then aggregate at each time.
        let mut acc = alloc::vec![0.0; nb];
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            for (b, a) in acc.iter_mut().enumerate() {
                let now = self.per_snapshot[i].norms[b];
                if q.is_infinite() {
                    *a = a.max(now);
                } else if i > 0 {
                    let prev = self.per_snapshot[i - 1].norms[b];
                    let h = 0.5 * (self.times[i] - self.times[i - 1]);
                    *a += h * (now.powf(q) + prev.powf(q));
                }
            }
            out.push(lr_aggregate(
                acc.iter().enumerate().map(|(b, a)| {
                    let t = if q.is_infinite() { *a } else { a.powf(1.0 / q) };
                    self.weight(b, s) * t
                }),
                r,
            ));
        }
        out
    }

    /// `t_i ↦ ‖f(t_i)‖_{Ḃ^s_{p,r}}`.
    pub fn besov_trace(&self, s: f64, r: f64) -> Vec<f64> {
        self.per_snapshot.iter().map(|n| n.besov(s, r)).collect()
    }

    /// `‖f‖_{L^q_T(Ḃ^s_{p,r})}`: time norm taken outside the `ℓ^r` sum.
    pub fn lebesgue_besov(&self, s: f64, q: f64, r: f64) -> f64 {
        time_norm(&self.times, &self.besov_trace(s, r), q)
    }
}

/// `‖f‖_{L̃^q_T(Ḃ^s_{p,r})}` with the trapezoid rule in time.
pub fn chemin_lerner_norm(series: &TimeSeriesField, spec: &BesovSpec, bank: &FilterBank) -> Result<f64> {
    spec.validate()?;
    let q = spec
        .q
        .ok_or_else(|| Error::Parameter("Chemin-Lerner norm needs a time exponent q".into()))?;
    Ok(series.block_norms(bank, spec.p)?.chemin_lerner(spec.s, q, spec.r))
}

/// `‖f‖_{L^q_T(Ḃ^s_{p,r})}`, the Bochner-type norm with time outside.
pub fn lebesgue_besov_norm(series: &TimeSeriesField, spec: &BesovSpec, bank: &FilterBank) -> Result<f64> {
    spec.validate()?;
    let q = spec
        .q
        .ok_or_else(|| Error::Parameter("time exponent q is required".into()))?;
    Ok(series.block_norms(bank, spec.p)?.lebesgue_besov(spec.s, q, spec.r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::littlewood_paley::besov_norm;
    use crate::random::{random_band_limited, seeded, symmetric_unit};
    use crate::spectral::lp_norm;

    fn bank() -> FilterBank {
        FilterBank::resolved(FrequencyGrid::periodic(2, 32).unwrap()).unwrap()
    }

    fn mesh(n: usize, t: f64) -> Vec<f64> {
        (0..=n).map(|i| t * i as f64 / n as f64).collect()
    }

    #[test]
    fn constant_series_factorizes() {
        let b = bank();
        let f = random_band_limited(b.grid(), 1, 1.0, 6.0, &mut seeded(1));
        let series = TimeSeriesField::constant(f.clone(), mesh(10, 0.7)).unwrap();
        for q in [1.0, 2.0, 3.5] {
            let spec = BesovSpec::new(0.5, 2.0, 1.0).unwrap().with_time(q).unwrap();
            let cl = chemin_lerner_norm(&series, &spec, &b).unwrap();
            let expect = 0.7f64.powf(1.0 / q) * besov_norm(&f, &spec, &b).unwrap();
            assert!((cl - expect).abs() <= 1e-12 * expect);
        }
    }

    #[test]
    fn one_snapshot_infinite_q_is_besov() {
        let b = bank();
        let f = random_band_limited(b.grid(), 2, 1.0, 6.0, &mut seeded(2));
        let series = TimeSeriesField::new(alloc::vec![0.0], alloc::vec![f.clone()]).unwrap();
        let spec = BesovSpec::new(-0.3, 3.0, 2.0).unwrap().with_time(f64::INFINITY).unwrap();
        assert_eq!(
            chemin_lerner_norm(&series, &spec, &b).unwrap(),
            besov_norm(&f, &spec, &b).unwrap()
        );
    }

    #[test]
    fn decaying_mode_closed_form() {
        // u(t) = e^{-|k|^2 t} cos(x0 + x1), |k|² = 2, one shell (j = 0) active.
        let b = bank();
        let base = Field::from_fn(*b.grid(), 1, |x, o| o[0] = (x[0] + x[1]).cos());
        let n = 400;
        let t_end = 0.5;
        let times = mesh(n, t_end);
        let snaps = times.iter().map(|t| base.scaled((-2.0 * t).exp())).collect();
        let series = TimeSeriesField::new(times, snaps).unwrap();
        let amp = lp_norm(&base, 2.0).unwrap();
        for q in [1.0, 2.0] {
            let spec = BesovSpec::new(1.0, 2.0, 1.0).unwrap().with_time(q).unwrap();
            let got = chemin_lerner_norm(&series, &spec, &b).unwrap();
            let exact = amp * ((1.0 - (-2.0 * q * t_end).exp()) / (2.0 * q)).powf(1.0 / q);
            // trapezoid error ~ h² (2q)² / 12 relative
            assert!((got - exact).abs() <= 2e-5 * exact, "q={q}: {got} vs {exact}");
        }
    }

    #[test]
    fn minkowski_ordering() {
        let b = bank();
        let mut rng = seeded(77);
        for _ in 0..10 {
            let times = mesh(12, 1.0);
            let snaps: Vec<Field> = times
                .iter()
                .map(|_| {
                    let amp = 1.0 + symmetric_unit(&mut rng);
                    random_band_limited(b.grid(), 1, 1.0, 8.0, &mut rng).scaled(amp)
                })
                .collect();
            let series = TimeSeriesField::new(times, snaps).unwrap();
            let norms = series.block_norms(&b, 2.0).unwrap();
            for (q, r) in [(1.0, 2.0), (2.0, 2.0), (1.0, f64::INFINITY), (3.0, 1.0), (f64::INFINITY, 1.0)] {
                let tilde = norms.chemin_lerner(0.3, q, r);
                let plain = norms.lebesgue_besov(0.3, q, r);
                if q <= r {
                    assert!(tilde <= plain * (1.0 + 1e-12));
                }
                if q >= r {
                    assert!(tilde >= plain * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn trace_matches_prefix_norms() {
        let b = bank();
        let mut rng = seeded(8);
        let times = mesh(6, 0.3);
        let snaps = times
            .iter()
            .map(|_| random_band_limited(b.grid(), 1, 1.0, 8.0, &mut rng))
            .collect();
        let series = TimeSeriesField::new(times, snaps).unwrap();
        let norms = series.block_norms(&b, 2.0).unwrap();
        for q in [1.0, 2.0, f64::INFINITY] {
            let trace = norms.chemin_lerner_trace(0.5, q, 1.0);
            for (i, v) in trace.iter().enumerate() {
                let direct = norms.chemin_lerner_prefix(i + 1, 0.5, q, 1.0);
                assert!((v - direct).abs() <= 1e-12 * direct.max(1e-300));
            }
        }
    }

    #[test]
    fn series_validation() {
        let b = bank();
        let f = Field::zeros(*b.grid(), 1);
        assert_eq!(TimeSeriesField::new(alloc::vec![], alloc::vec![]), Err(Error::EmptySeries));
        assert!(TimeSeriesField::constant(f.clone(), alloc::vec![0.0, 0.0]).is_err());
        assert!(TimeSeriesField::constant(f.clone(), alloc::vec![0.1, 0.2]).is_err());
        let spec = BesovSpec::new(0.0, 2.0, 1.0).unwrap();
        let s = TimeSeriesField::constant(f, alloc::vec![0.0, 1.0]).unwrap();
        assert!(chemin_lerner_norm(&s, &spec, &b).is_err());
    }

    #[test]
    fn interpolation_is_linear() {
        let b = bank();
        let f = random_band_limited(b.grid(), 1, 1.0, 4.0, &mut seeded(3));
        let series = TimeSeriesField::new(alloc::vec![0.0, 1.0], alloc::vec![Field::zeros(*b.grid(), 1), f.clone()]).unwrap();
        let mid = series.interpolate(0.25);
        assert!(lp_norm(&mid.sub(&f.scaled(0.25)).unwrap(), 2.0).unwrap() < 1e-15);
        assert_eq!(series.interpolate(2.0), f);
    }
}
