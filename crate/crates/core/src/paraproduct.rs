//! Bony's decomposition `uv = Ṫ_u v + Ṫ_v u + Ṙ(u, v)` and empirical ratios
//! for the product laws and the logarithmic interpolation inequality.
//!
//! Components are handled as in [`dealiased_product`]: equal component
//! counts multiply pairwise and a scalar broadcasts against a vector.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use crate::field::{Field, SpectralField};
use crate::grid::Lattice;
use crate::littlewood_paley::{FilterBank, TimeSeriesField};
use crate::spectral::{
    dealiased_product, forward_in_place, mask_in_place, mask_slice, physical_component,
    product_annulus, support_radii, trim_to_annulus,
};
use crate::{Error, Result};

/// Measured left side of an inequality against its right-side factors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateReport {
    pub variant: String,
    /// Index metadata, e.g. `("s1", 1.0)`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float::pairs"))]
    pub indices: Vec<(String, f64)>,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub lhs: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float::pairs"))]
    pub factors: Vec<(String, f64)>,
    /// `lhs / Π factors`; `0` when both sides vanish.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub ratio: f64,
    /// Set when the factor product is zero.
    pub degenerate: bool,
}

impl EstimateReport {
    pub fn new(
        variant: impl Into<String>,
        indices: Vec<(String, f64)>,
        lhs: f64,
        factors: Vec<(String, f64)>,
    ) -> Self {
        let denominator: f64 = factors.iter().map(|(_, v)| *v).product();
        let (ratio, degenerate) = if denominator > 0.0 {
            (lhs / denominator, false)
        } else if lhs == 0.0 {
            (0.0, true)
        } else {
            (f64::INFINITY, true)
        };
        Self {
            variant: variant.into(),
            indices,
            lhs,
            factors,
            ratio,
            degenerate,
        }
    }

    pub fn index(&self, name: &str) -> Option<f64> {
        self.indices.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

pub(crate) fn named(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
    pairs.iter().map(|(n, v)| (String::from(*n), *v)).collect()
}

/// The three Bony pieces plus the product of the means, which no
/// homogeneous block sees.
#[derive(Debug, Clone, PartialEq)]
pub struct BonyParts {
    pub t_uv: Field,
    pub t_vu: Field,
    pub r_uv: Field,
    pub mean_product: Field,
}

impl BonyParts {
    /// `Ṫ_u v + Ṫ_v u + Ṙ(u, v) + ū v̄`.
    pub fn reconstruct(&self) -> Field {
        self.t_uv
            .add(&self.t_vu)
            .and_then(|s| s.add(&self.r_uv))
            .and_then(|s| s.add(&self.mean_product))
            .expect("parts share a shape")
    }
}

fn output_components(a: usize, b: usize) -> Result<usize> {
    match (a, b) {
        (x, y) if x == y => Ok(x),
        (1, y) => Ok(y),
        (x, 1) => Ok(x),
        (x, y) => Err(Error::Components {
            expected: x,
            found: y,
        }),
    }
}

fn check_pair(bank: &FilterBank, u: &SpectralField, v: &SpectralField) -> Result<usize> {
    if u.grid() != bank.grid() || v.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    output_components(u.components(), v.components())
}

/// One paraproduct term `(Ṡ_{j-1} u)(Δ̇_j v)`, dealiased, with exact zeros
/// outside the support annulus of the pair.
pub fn paraproduct_term(bank: &FilterBank, j: i32, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    check_pair(bank, u, v)?;
    bank.check_block(j)?;
    let low = u.apply_weights(&bank.low_pass_weights_unchecked(j - 1));
    let high = v.apply_weights(bank.weights_unchecked(j));
    dealiased_product(&low, &high)
}

/// `Ṫ_u v = Σ_j (Ṡ_{j-1} u)(Δ̇_j v)` over the whole band, in Fourier space.
///
/// The lowest term uses `Ṡ_{j_min - 1} u = ū`, so `Ṫ_1 v` is the band part
/// of `v`.
pub fn paraproduct_spectral(bank: &FilterBank, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let components = check_pair(bank, u, v)?;
    let mut out = SpectralField::zeros(*bank.grid(), components);
    for j in bank.indices() {
        out.add_assign(&paraproduct_term(bank, j, u, v)?);
    }
    Ok(out)
}

pub fn paraproduct(bank: &FilterBank, u: &Field, v: &Field) -> Result<Field> {
    Ok(paraproduct_spectral(bank, &u.to_spectral(), &v.to_spectral())?.to_physical())
}

/// Masked blocks of one component on the grid, with their support radii.
fn physical_blocks(bank: &FilterBank, chunk: &[Complex64], lattice: &Lattice) -> Vec<Option<(Vec<f64>, (f64, f64))>> {
    bank.indices()
        .map(|j| {
            let mut block: Vec<Complex64> = chunk
                .iter()
                .zip(bank.weights_unchecked(j))
                .map(|(z, w)| z * w)
                .collect();
            mask_slice(&mut block, lattice);
            support_radii(&block, lattice).map(|radii| (physical_component(&block, lattice), radii))
        })
        .collect()
}

/// `Ṙ(u, v) = Σ_j Δ̇_j u Δ̃_j v`, with `Δ̃_j = Δ̇_{j-1} + Δ̇_j + Δ̇_{j+1}`.
///
/// Terms are accumulated on the grid as `u_j v_j` followed by the pairs
/// `u_j v_{j+1} + u_{j+1} v_j`, so swapping `u` and `v` reproduces the same
/// floating-point operations.
pub fn remainder_spectral(bank: &FilterBank, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let components = check_pair(bank, u, v)?;
    let lattice = bank.grid().lattice();
    let len = lattice.len();
    let pick = |n: usize, c: usize| if n == 1 { 0 } else { c };
    let mut out = SpectralField::zeros(*bank.grid(), components);
    for c in 0..components {
        let ub = physical_blocks(bank, u.component(pick(u.components(), c)), &lattice);
        let vb = physical_blocks(bank, v.component(pick(v.components(), c)), &lattice);
        let mut acc = vec![0.0; len];
        let mut hull: Option<(f64, f64)> = None;
        let mut widen = |a: &(f64, f64), b: &(f64, f64)| {
            let (lo, hi) = product_annulus(*a, *b);
            hull = Some(match hull {
                None => (lo, hi),
                Some((l, h)) => (l.min(lo), h.max(hi)),
            });
        };
        for j in 0..ub.len() {
            if let (Some((x, sx)), Some((y, sy))) = (&ub[j], &vb[j]) {
                widen(sx, sy);
                for i in 0..len {
                    acc[i] += x[i] * y[i];
                }
            }
        }
        for j in 0..ub.len().saturating_sub(1) {
            let forward = match (&ub[j], &vb[j + 1]) {
                (Some((x, sx)), Some((y, sy))) => {
                    widen(sx, sy);
                    Some((x, y))
                }
                _ => None,
            };
            let backward = match (&ub[j + 1], &vb[j]) {
                (Some((x, sx)), Some((y, sy))) => {
                    widen(sx, sy);
                    Some((x, y))
                }
                _ => None,
            };
            match (forward, backward) {
                (Some((a, b)), Some((e, f))) => {
                    for i in 0..len {
                        acc[i] += a[i] * b[i] + e[i] * f[i];
                    }
                }
                (Some((a, b)), None) | (None, Some((a, b))) => {
                    for i in 0..len {
                        acc[i] += a[i] * b[i];
                    }
                }
                (None, None) => {}
            }
        }
        let Some(hull) = hull else { continue };
        let dst = out.component_mut(c);
        for (z, x) in dst.iter_mut().zip(&acc) {
            *z = Complex64::new(*x, 0.0);
        }
        forward_in_place(dst, &lattice);
        mask_slice(dst, &lattice);
        trim_to_annulus(dst, &lattice, hull);
    }
    Ok(out)
}

pub fn remainder(bank: &FilterBank, u: &Field, v: &Field) -> Result<Field> {
    Ok(remainder_spectral(bank, &u.to_spectral(), &v.to_spectral())?.to_physical())
}

pub fn bony_decomposition(bank: &FilterBank, u: &Field, v: &Field) -> Result<BonyParts> {
    let us = u.to_spectral();
    let vs = v.to_spectral();
    let components = check_pair(bank, &us, &vs)?;
    let mean = |f: &SpectralField| {
        let mut m = SpectralField::zeros(*f.grid(), f.components());
        for c in 0..f.components() {
            m.component_mut(c)[0] = f.component(c)[0];
        }
        m
    };
    let mut mean_product = dealiased_product(&mean(&us), &mean(&vs))?;
    let lattice = bank.grid().lattice();
    mask_in_place(&mut mean_product, &lattice);
    debug_assert_eq!(mean_product.components(), components);
    Ok(BonyParts {
        t_uv: paraproduct_spectral(bank, &us, &vs)?.to_physical(),
        t_vu: paraproduct_spectral(bank, &vs, &us)?.to_physical(),
        r_uv: remainder_spectral(bank, &us, &vs)?.to_physical(),
        mean_product: mean_product.to_physical(),
    })
}

/// Which product estimate to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ProductVariant {
    /// `‖Ṫ_g f‖_{Ḃ^{s1+s2-d/p}_{p,1}} ≲ ‖f‖_{Ḃ^{s1}_{p,1}} ‖g‖_{Ḃ^{s2}_{p,1}}`, needs `s2 ≤ d/p`.
    Paraproduct,
    /// `‖Ṙ(f, g)‖` in the same spaces, needs `s1 + s2 > d max(0, 2/p - 1)`.
    Remainder,
    /// `‖fg‖` in the same spaces, needs `s1, s2 ≤ d/p` and the remainder condition.
    Full,
    /// `‖fg‖_{Ḃ^{s1+s2-d/p}_{p,∞}} ≲ ‖f‖_{Ḃ^{s1}_{p,1}} ‖g‖_{Ḃ^{s2}_{p,∞}}`,
    /// needs `s1 ≤ d/p`, `s2 < d/p`, `s1 + s2 ≥ d max(0, 2/p - 1)`.
    Mixed,
}

impl ProductVariant {
    pub const ALL: [ProductVariant; 4] = [
        ProductVariant::Paraproduct,
        ProductVariant::Remainder,
        ProductVariant::Full,
        ProductVariant::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProductVariant::Paraproduct => "paraproduct",
            ProductVariant::Remainder => "remainder",
            ProductVariant::Full => "full",
            ProductVariant::Mixed => "mixed",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    /// Checks the index hypotheses of the estimate.
    pub fn check_indices(self, d: usize, p: f64, s1: f64, s2: f64) -> Result<()> {
        let critical = d as f64 / p;
        let floor = d as f64 * (2.0 / p - 1.0).max(0.0);
        let fail = |what: &str| {
            Err(Error::IndexCondition(alloc::format!(
                "{} estimate requires {what} (d = {d}, p = {p}, s1 = {s1}, s2 = {s2})",
                self.name()
            )))
        };
        match self {
            ProductVariant::Paraproduct if s2 > critical => fail("s2 <= d/p"),
            ProductVariant::Remainder if s1 + s2 <= floor => fail("s1 + s2 > d max(0, 2/p - 1)"),
            ProductVariant::Full if s1 > critical || s2 > critical => fail("s1, s2 <= d/p"),
            ProductVariant::Full if s1 + s2 <= floor => fail("s1 + s2 > d max(0, 2/p - 1)"),
            ProductVariant::Mixed if s1 > critical || s2 >= critical => fail("s1 <= d/p and s2 < d/p"),
            ProductVariant::Mixed if s1 + s2 < floor => fail("s1 + s2 >= d max(0, 2/p - 1)"),
            _ => Ok(()),
        }
    }
}

/// Empirical constant of one product estimate on the pair `(f, g)`.
pub fn product_law_ratio(
    bank: &FilterBank,
    f: &Field,
    g: &Field,
    s1: f64,
    s2: f64,
    p: f64,
    variant: ProductVariant,
) -> Result<EstimateReport> {
    crate::spectral::check_exponent(p)?;
    let d = bank.grid().dim();
    variant.check_indices(d, p, s1, s2)?;
    let fs = f.to_spectral();
    let gs = g.to_spectral();
    check_pair(bank, &fs, &gs)?;
    let object = match variant {
        ProductVariant::Paraproduct => paraproduct_spectral(bank, &gs, &fs)?,
        ProductVariant::Remainder => remainder_spectral(bank, &fs, &gs)?,
        ProductVariant::Full | ProductVariant::Mixed => dealiased_product(&fs, &gs)?,
    };
    let s = s1 + s2 - d as f64 / p;
    let (r_out, r_g) = match variant {
        ProductVariant::Mixed => (f64::INFINITY, f64::INFINITY),
        _ => (1.0, 1.0),
    };
    use crate::littlewood_paley::block_norms_spectral;
    let lhs = block_norms_spectral(bank, &object, p)?.besov(s, r_out);
    let nf = block_norms_spectral(bank, &fs, p)?.besov(s1, 1.0);
    let ng = block_norms_spectral(bank, &gs, p)?.besov(s2, r_g);
    let g_label = if r_g == 1.0 { "g in B^{s2}_{p,1}" } else { "g in B^{s2}_{p,inf}" };
    Ok(EstimateReport::new(
        variant.name(),
        named(&[("d", d as f64), ("p", p), ("s1", s1), ("s2", s2), ("s", s)]),
        lhs,
        vec![(String::from("f in B^{s1}_{p,1}"), nf), (String::from(g_label), ng)],
    ))
}

/// Empirical constant of the logarithmic interpolation inequality, i.e.
/// `lhs / rhs` with
/// `lhs = ‖f‖_{L̃^q(Ḃ^s_{p,1})}` and
/// `rhs = ε^{-1} ‖f‖_{L̃^q(Ḃ^s_{p,∞})} log(e + (‖f‖_{L̃^q(Ḃ^{s-ε}_{p,∞})} + ‖f‖_{L̃^q(Ḃ^{s+ε}_{p,∞})}) / ‖f‖_{L̃^q(Ḃ^s_{p,∞})})`.
pub fn log_interpolation_ratio(
    bank: &FilterBank,
    series: &TimeSeriesField,
    s: f64,
    p: f64,
    q: f64,
    epsilon: f64,
) -> Result<EstimateReport> {
    crate::spectral::check_exponent(q)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter(alloc::format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let norms = series.block_norms(bank, p)?;
    let lhs = norms.chemin_lerner(s, q, 1.0);
    let mid = norms.chemin_lerner(s, q, f64::INFINITY);
    let low = norms.chemin_lerner(s - epsilon, q, f64::INFINITY);
    let high = norms.chemin_lerner(s + epsilon, q, f64::INFINITY);
    let log_factor = if mid > 0.0 {
        (core::f64::consts::E + (low + high) / mid).ln()
    } else {
        0.0
    };
    Ok(EstimateReport::new(
        "log-interpolation",
        named(&[("s", s), ("p", p), ("q", q), ("epsilon", epsilon)]),
        lhs,
        vec![
            (String::from("L~q(B^s_{p,inf}) / epsilon"), mid / epsilon),
            (String::from("log factor"), log_factor),
        ],
    ))
}

/// Logarithmic interpolation constant for a single snapshot, i.e. the
/// `q = ∞` ratio on a one-element series.
pub fn log_interpolation_ratio_static(bank: &FilterBank, f: &Field, s: f64, p: f64, epsilon: f64) -> Result<EstimateReport> {
    let series = TimeSeriesField::new(vec![0.0], vec![f.clone()])?;
    log_interpolation_ratio(bank, &series, s, p, f64::INFINITY, epsilon)
}

/// `max / median` of a corpus of ratios; `None` when the median is zero.
pub fn spread(ratios: &[f64]) -> Option<f64> {
    let median = crate::stats::median(ratios)?;
    let max = crate::stats::max(ratios)?;
    if median > 0.0 {
        Some(max / median)
    } else {
        None
    }
}
