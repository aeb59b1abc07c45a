use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use super::FilterBank;
use crate::field::{Field, SpectralField};
use crate::spectral::{check_exponent, lp_norm_spectral_unchecked};
use crate::{Error, Result};

/// Indices `(s, p, r)` of `Ḃ^s_{p,r}`, plus an optional time exponent `q`
/// for `L̃^q_T(Ḃ^s_{p,r})`. Infinite exponents are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BesovSpec {
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub s: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub p: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float"))]
    pub r: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_float::option"))]
    pub q: Option<f64>,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        let spec = Self { s, p, r, q: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_time(self, q: f64) -> Result<Self> {
        let spec = Self { q: Some(q), ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::Parameter("regularity index must be finite".into()));
        }
        check_exponent(self.p)?;
        check_exponent(self.r)?;
        if let Some(q) = self.q {
            check_exponent(q)?;
        }
        Ok(())
    }
}

/// `ℓ^r` norm of a finite sequence; `r = ∞` is the maximum.
pub fn lr_aggregate<I: IntoIterator<Item = f64>>(values: I, r: f64) -> f64 {
    let iter = values.into_iter();
    if r.is_infinite() {
        iter.fold(0.0, f64::max)
    } else if r == 1.0 {
        iter.sum()
    } else {
        iter.map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `‖Δ̇_j f‖_{L^p}` for every block of the bank, plus the mean mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockNorms {
    pub j_min: i32,
    pub p: f64,
    pub norms: Vec<f64>,
    /// Per-component mean, excluded from every homogeneous norm.
    pub mean: Vec<f64>,
}

impl BlockNorms {
    pub fn j_max(&self) -> i32 {
        self.j_min + self.norms.len() as i32 - 1
    }

    pub fn norm(&self, j: i32) -> f64 {
        self.norms[(j - self.j_min) as usize]
    }

    /// `‖(2^{js} ‖Δ̇_j f‖_{L^p})_j‖_{ℓ^r}`.
    pub fn besov(&self, s: f64, r: f64) -> f64 {
        lr_aggregate(
            self.norms
                .iter()
                .enumerate()
                .map(|(i, n)| 2f64.powf((self.j_min + i as i32) as f64 * s) * n),
            r,
        )
    }
}

pub fn block_norms_spectral(bank: &FilterBank, field: &SpectralField, p: f64) -> Result<BlockNorms> {
    check_exponent(p)?;
    if field.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    let len = field.grid().len() as f64;
    let mean = (0..field.components())
        .map(|c| field.component(c)[0].re / len)
        .collect();
    let norms = bank
        .indices()
        .map(|j| {
            let block = field.apply_weights(bank.weights_unchecked(j));
            lp_norm_spectral_unchecked(&block, p)
        })
        .collect();
    Ok(BlockNorms {
        j_min: bank.j_min(),
        p,
        norms,
        mean,
    })
}

pub fn block_norms(bank: &FilterBank, field: &Field, p: f64) -> Result<BlockNorms> {
    block_norms_spectral(bank, &field.to_spectral(), p)
}

/// Homogeneous Besov norm over the bank's finite dyadic band.
pub fn besov_norm(field: &Field, spec: &BesovSpec, bank: &FilterBank) -> Result<f64> {
    spec.validate()?;
    Ok(block_norms(bank, field, spec.p)?.besov(spec.s, spec.r))
}
