use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use super::{ANNULUS_INNER, ANNULUS_OUTER};
use crate::field::{Field, SpectralField};
use crate::spectral::{check_exponent, lp_norm_unchecked, spectral_multi_derivative};
use crate::{Error, Result};

/// Spectral support hypothesis, at scale `λ`.
///
/// `Ball` is `{|ξ| ≤ 8λ/3}` and `Ring` is `{3λ/4 ≤ |ξ| ≤ 8λ/3}`, the sets on
/// which the dyadic blocks live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SupportShape {
    Ball,
    Ring,
}

impl SupportShape {
    pub fn radii(self, lambda: f64) -> (f64, f64) {
        match self {
            SupportShape::Ball => (0.0, ANNULUS_OUTER * lambda),
            SupportShape::Ring => (ANNULUS_INNER * lambda, ANNULUS_OUTER * lambda),
        }
    }
}

/// Accepted range for the measured ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BernsteinWindow {
    pub lower_min: f64,
    pub upper_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BernsteinReport {
    pub shape: SupportShape,
    pub lambda: f64,
    pub order: u32,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub p: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub q: f64,
    /// `sup_{|α|=k} ‖∂^α f‖_{L^q} / (λ^{k + d(1/p - 1/q)} ‖f‖_{L^p})`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub upper_ratio: f64,
    /// `sup_{|α|=k} ‖∂^α f‖_{L^p} / (λ^k ‖f‖_{L^p})`, ring case only.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float::option"))]
    pub lower_ratio: Option<f64>,
    pub degenerate: bool,
    pub within_window: Option<bool>,
}

/// All multi-indices of length `dim` and order `k`.
pub fn multi_indices(dim: usize, k: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    match dim {
        2 => {
            for a in 0..=k {
                out.push([a, k - a, 0]);
            }
        }
        _ => {
            for a in 0..=k {
                for b in 0..=k - a {
                    out.push([a, b, k - a - b]);
                }
            }
        }
    }
    out
}

fn check_support(field: &SpectralField, shape: SupportShape, lambda: f64) -> Result<()> {
    let lattice = field.grid().lattice();
    let (lo, hi) = shape.radii(lambda);
    let slack = 1e-9 * lattice.grid.fundamental();
    let peak = field.coefficients().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = 1e-12 * peak;
    let len = lattice.len();
    for chunk in field.coefficients().chunks_exact(len) {
        for (z, r) in chunk.iter().zip(&lattice.norm) {
            if z.norm() > threshold && (*r < lo - slack || *r > hi + slack) {
                return Err(Error::Support(alloc::format!(
                    "mode at |k| = {r} lies outside [{lo}, {hi}]"
                )));
            }
        }
    }
    Ok(())
}

/// Measures the Bernstein ratios of `field` after checking its support.
pub fn bernstein_ratios(
    field: &Field,
    shape: SupportShape,
    lambda: f64,
    order: u32,
    p: f64,
    q: f64,
    window: Option<BernsteinWindow>,
) -> Result<BernsteinReport> {
    check_exponent(p)?;
    check_exponent(q)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(alloc::format!("scale must be positive, got {lambda}")));
    }
    let spectral = field.to_spectral();
    check_support(&spectral, shape, lambda)?;
    let dim = field.grid().dim();
    let base = lp_norm_unchecked(field, p);
    let mut sup_q = 0.0f64;
    let mut sup_p = 0.0f64;
    for alpha in multi_indices(dim, order) {
        let derivative = spectral_multi_derivative(&spectral, &alpha[..dim])?.to_physical();
        sup_q = sup_q.max(lp_norm_unchecked(&derivative, q));
        if shape == SupportShape::Ring {
            sup_p = sup_p.max(lp_norm_unchecked(&derivative, p));
        }
    }
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let exponent = order as f64 + dim as f64 * (inv(p) - inv(q));
    let degenerate = base == 0.0;
    let ratio = |num: f64, scale: f64| if degenerate { 0.0 } else { num / (scale * base) };
    let upper_ratio = ratio(sup_q, lambda.powf(exponent));
    let lower_ratio = match shape {
        SupportShape::Ring => Some(ratio(sup_p, lambda.powi(order as i32))),
        SupportShape::Ball => None,
    };
    let within_window = window.map(|w| {
        upper_ratio <= w.upper_max && lower_ratio.map_or(true, |l| l >= w.lower_min)
    });
    Ok(BernsteinReport {
        shape,
        lambda,
        order,
        p,
        q,
        upper_ratio,
        lower_ratio,
        degenerate,
        within_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::random::{random_band_limited, seeded};

    fn grid() -> FrequencyGrid {
        FrequencyGrid::periodic(2, 32).unwrap()
    }

    #[test]
    fn single_mode_gradient_ratio_is_one() {
        let f = Field::from_fn(grid(), 1, |x, o| o[0] = (3.0 * x[0]).sin());
        let report = bernstein_ratios(&f, SupportShape::Ring, 3.0, 1, 2.0, 2.0, None).unwrap();
        assert!((report.upper_ratio - 1.0).abs() < 1e-13);
        assert!((report.lower_ratio.unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn ball_ratio_bounded_by_mode_count() {
        // ‖f‖_∞ ≤ Σ|c_k| ≤ √M ‖f‖_2 for M lattice modes in the ball.
        let g = grid();
        let lambda = 2.0;
        let radius = ANNULUS_OUTER * lambda;
        let modes = (0..g.len())
            .filter(|&i| g.lattice().norm[i] <= radius)
            .count() as f64;
        let mut rng = seeded(5);
        for _ in 0..10 {
            let f = random_band_limited(&g, 1, 0.0, radius, &mut rng);
            let r = bernstein_ratios(&f, SupportShape::Ball, lambda, 0, 2.0, f64::INFINITY, None).unwrap();
            let direct = f.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()))
                / crate::spectral::lp_norm(&f, 2.0).unwrap()
                / lambda.powi(2).powf(0.5);
            assert!((r.upper_ratio - direct).abs() <= 1e-12 * direct);
            assert!(r.upper_ratio * lambda <= modes.sqrt());
        }
    }

    #[test]
    fn rejects_wrong_support() {
        let f = Field::from_fn(grid(), 1, |x, o| o[0] = x[0].cos() + (6.0 * x[1]).cos());
        assert!(matches!(
            bernstein_ratios(&f, SupportShape::Ring, 2.0, 1, 2.0, 2.0, None),
            Err(Error::Support(_))
        ));
    }

    #[test]
    fn window_flag() {
        let f = Field::from_fn(grid(), 1, |x, o| o[0] = (2.0 * x[1]).cos());
        let w = BernsteinWindow { lower_min: 0.5, upper_max: 2.0 };
        let r = bernstein_ratios(&f, SupportShape::Ring, 2.0, 2, 2.0, 2.0, Some(w)).unwrap();
        assert_eq!(r.within_window, Some(true));
        let zero = Field::zeros(grid(), 1);
        let r = bernstein_ratios(&zero, SupportShape::Ring, 2.0, 1, 2.0, 2.0, None).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.upper_ratio, 0.0);
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(2, 3).len(), 4);
        assert_eq!(multi_indices(3, 2).len(), 6);
    }
}
