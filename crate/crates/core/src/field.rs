//! Real sampled fields, their Fourier coefficients, and rank-2 tensor fields.
//!
//! Transform convention: the forward transform is the unnormalized DFT
//! `F(k) = Σ_x f(x) e^{-i k·x}` over the grid samples; the inverse divides by
//! `N^d`. [`SpectralField::to_physical`] keeps the real part of the inverse.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use crate::fft;
use crate::grid::FrequencyGrid;
use crate::{Error, Result};

/// A `components`-valued real field sampled on a grid.
///
/// Samples are stored component-major: component `c` occupies
/// `data[c * len .. (c + 1) * len]` with `len = N^d`, row-major inside.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: FrequencyGrid,
    components: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: FrequencyGrid, components: usize) -> Self {
        Self {
            grid,
            components,
            data: vec![0.0; components * grid.len()],
        }
    }

    /// Wraps raw samples, rejecting wrong lengths and non-finite values.
    pub fn from_samples(grid: FrequencyGrid, components: usize, data: Vec<f64>) -> Result<Self> {
        let expected = components * grid.len();
        if components == 0 || data.len() != expected {
            return Err(Error::Samples {
                expected,
                found: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            grid,
            components,
            data,
        })
    }

    /// Samples `f(x)` at every grid point; `f` writes all components.
    pub fn from_fn<F>(grid: FrequencyGrid, components: usize, mut f: F) -> Self
    where
        F: FnMut([f64; 3], &mut [f64]),
    {
        let len = grid.len();
        let mut data = vec![0.0; components * len];
        let mut value = vec![0.0; components];
        for flat in 0..len {
            f(grid.position(flat), &mut value);
            for (c, v) in value.iter().enumerate() {
                data[c * len + flat] = *v;
            }
        }
        Self {
            grid,
            components,
            data,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn samples(&self) -> &[f64] {
        &self.data
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.data[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let len = self.grid.len();
        &mut self.data[c * len..(c + 1) * len]
    }

    /// Builds a field out of scalar fields on a common grid.
    pub fn stack(parts: &[Field]) -> Result<Self> {
        let first = parts.first().ok_or(Error::Components {
            expected: 1,
            found: 0,
        })?;
        let mut data = Vec::with_capacity(parts.len() * first.data.len());
        let mut components = 0;
        for part in parts {
            if part.grid != first.grid {
                return Err(Error::GridMismatch);
            }
            components += part.components;
            data.extend_from_slice(&part.data);
        }
        Ok(Self {
            grid: first.grid,
            components,
            data,
        })
    }

    pub fn extract(&self, c: usize) -> Field {
        Field {
            grid: self.grid,
            components: 1,
            data: self.component(c).to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn ensure_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.components != other.components {
            return Err(Error::Components {
                expected: self.components,
                found: other.components,
            });
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Field {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= factor);
        out
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.ensure_compatible(other)?;
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.ensure_compatible(other)?;
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Field) -> Result<Field> {
        self.ensure_compatible(other)?;
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += factor * b);
        Ok(out)
    }

    /// Mean of every component.
    pub fn means(&self) -> Vec<f64> {
        let len = self.grid.len() as f64;
        (0..self.components)
            .map(|c| self.component(c).iter().sum::<f64>() / len)
            .collect()
    }

    /// Largest pointwise Euclidean magnitude.
    pub fn max_magnitude(&self) -> f64 {
        let len = self.grid.len();
        (0..len)
            .map(|i| {
                (0..self.components)
                    .map(|c| self.data[c * len + i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_spectral(&self) -> SpectralField {
        let len = self.grid.len();
        let mut coefficients: Vec<Complex64> =
            self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for chunk in coefficients.chunks_exact_mut(len) {
            fft::transform(chunk, self.grid.points(), self.grid.dim(), false);
        }
        SpectralField {
            grid: self.grid,
            components: self.components,
            coefficients,
        }
    }
}

/// Fourier coefficients of a field, same layout as [`Field`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: FrequencyGrid,
    components: usize,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: FrequencyGrid, components: usize) -> Self {
        Self {
            grid,
            components,
            coefficients: vec![Complex64::new(0.0, 0.0); components * grid.len()],
        }
    }

    pub fn from_coefficients(
        grid: FrequencyGrid,
        components: usize,
        coefficients: Vec<Complex64>,
    ) -> Result<Self> {
        let expected = components * grid.len();
        if components == 0 || coefficients.len() != expected {
            return Err(Error::Samples {
                expected,
                found: coefficients.len(),
            });
        }
        Ok(Self {
            grid,
            components,
            coefficients,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coefficients[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coefficients[c * len..(c + 1) * len]
    }

    pub fn extract(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: 1,
            coefficients: self.component(c).to_vec(),
        }
    }

    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts.first().ok_or(Error::Components {
            expected: 1,
            found: 0,
        })?;
        let mut coefficients = Vec::with_capacity(parts.len() * first.coefficients.len());
        let mut components = 0;
        for part in parts {
            if part.grid != first.grid {
                return Err(Error::GridMismatch);
            }
            components += part.components;
            coefficients.extend_from_slice(&part.coefficients);
        }
        Ok(Self {
            grid: first.grid,
            components,
            coefficients,
        })
    }

    pub fn ensure_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.components != other.components {
            return Err(Error::Components {
                expected: self.components,
                found: other.components,
            });
        }
        Ok(())
    }

    /// Multiplies every component by a per-mode real weight.
    pub fn apply_weights(&self, weights: &[f64]) -> SpectralField {
        let mut out = self.clone();
        out.apply_weights_in_place(weights);
        out
    }

    pub fn apply_weights_in_place(&mut self, weights: &[f64]) {
        let len = self.grid.len();
        debug_assert_eq!(weights.len(), len);
        for chunk in self.coefficients.chunks_exact_mut(len) {
            for (z, w) in chunk.iter_mut().zip(weights) {
                *z *= *w;
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        out.coefficients.iter_mut().for_each(|z| *z *= factor);
        out
    }

    pub fn add_assign(&mut self, other: &SpectralField) {
        debug_assert!(self.ensure_compatible(other).is_ok());
        self.coefficients
            .iter_mut()
            .zip(&other.coefficients)
            .for_each(|(a, b)| *a += b);
    }

    /// `self += factor * other`.
    pub fn axpy_assign(&mut self, factor: f64, other: &SpectralField) {
        debug_assert!(self.ensure_compatible(other).is_ok());
        self.coefficients
            .iter_mut()
            .zip(&other.coefficients)
            .for_each(|(a, b)| *a += b * factor);
    }

    /// Sum over components of `Σ_k |F(k)|² / N^{2d}`, i.e. the squared
    /// normalized L² norm of the represented field (Parseval).
    pub fn energy(&self) -> f64 {
        let len = self.grid.len() as f64;
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>() / (len * len)
    }

    /// Largest violation of `F(-k) = conj F(k)`, relative to the largest
    /// coefficient magnitude.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let grid = self.grid;
        let len = grid.len();
        let scale = self
            .coefficients
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let comp = self.component(c);
            for (flat, z) in comp.iter().enumerate() {
                let m = grid.modes(flat);
                let mirror = grid.flat_index(&[-m[0], -m[1], -m[2]]);
                worst = worst.max((z - comp[mirror].conj()).norm());
            }
        }
        debug_assert!(len > 0);
        worst / scale
    }

    pub fn to_physical(&self) -> Field {
        let len = self.grid.len();
        let mut work = self.coefficients.clone();
        let norm = 1.0 / len as f64;
        for chunk in work.chunks_exact_mut(len) {
            fft::transform(chunk, self.grid.points(), self.grid.dim(), true);
        }
        Field {
            grid: self.grid,
            components: self.components,
            data: work.iter().map(|z| z.re * norm).collect(),
        }
    }
}

/// A `d × d` tensor field, entry `(i, j)` stored as component `i * d + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    entries: Field,
}

impl TensorField {
    pub fn from_entries(entries: Field) -> Result<Self> {
        let d = entries.grid().dim();
        if entries.components() != d * d {
            return Err(Error::Components {
                expected: d * d,
                found: entries.components(),
            });
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.grid().dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> &[f64] {
        self.entries.component(i * self.dim() + j)
    }

    pub fn as_field(&self) -> &Field {
        &self.entries
    }

    pub fn into_field(self) -> Field {
        self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn zero_field_has_zero_spectrum() {
        let g = FrequencyGrid::periodic(2, 8).unwrap();
        let spec = Field::zeros(g, 1).to_spectral();
        assert!(spec.coefficients().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn cosine_has_two_modes() {
        let g = FrequencyGrid::periodic(2, 16).unwrap();
        let f = Field::from_fn(g, 1, |x, out| out[0] = x[0].cos());
        let spec = f.to_spectral();
        let n2 = g.len() as f64;
        for (flat, z) in spec.coefficients().iter().enumerate() {
            let m = g.modes(flat);
            if (m[0] == 1 || m[0] == -1) && m[1] == 0 {
                assert!((z.re - n2 / 2.0).abs() < 1e-10 && z.im.abs() < 1e-10);
            } else {
                assert!(z.norm() < 1e-10, "mode {m:?}: {z}");
            }
        }
    }

    #[test]
    fn round_trip_and_symmetry() {
        let g = FrequencyGrid::new(3, 8, 3.0).unwrap();
        let f = Field::from_fn(g, 2, |x, out| {
            out[0] = (2.0 * PI * x[0] / 3.0).sin() * (x[2] * 1.7).cos();
            out[1] = 0.3 + (x[1] * 0.9).sin();
        });
        let spec = f.to_spectral();
        assert!(spec.conjugate_symmetry_error() < 1e-12);
        let back = spec.to_physical();
        let err = f.sub(&back).unwrap().samples().iter().map(|x| x * x).sum::<f64>();
        let norm = f.samples().iter().map(|x| x * x).sum::<f64>();
        assert!((err / norm).sqrt() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = FrequencyGrid::periodic(2, 8).unwrap();
        let mut data = vec![0.0; 64];
        data[3] = f64::NAN;
        assert_eq!(Field::from_samples(g, 1, data), Err(Error::NonFinite));
        assert!(Field::from_samples(g, 1, vec![0.0; 63]).is_err());
    }
}
