use alloc::format;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use crate::field::{Field, SpectralField};
use crate::grid::FrequencyGrid;
use crate::{Error, Result};

/// Inner radius of the annulus carrying the dyadic profile.
pub const ANNULUS_INNER: f64 = 3.0 / 4.0;
/// Outer radius of the annulus carrying the dyadic profile.
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;

/// Powers `2^{-m}` for `m = 3, 2, ..., -3`, in increasing order.
const OCTAVES: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// The smooth bump `ψ(ρ) = exp(-1 / (x (1 - x)))` with
/// `x = (ρ - 3/4) / (8/3 - 3/4)`, and exactly zero outside `(3/4, 8/3)`.
pub fn bump(rho: f64) -> f64 {
    if !(rho > ANNULUS_INNER && rho < ANNULUS_OUTER) {
        return 0.0;
    }
    let x = (rho - ANNULUS_INNER) / (ANNULUS_OUTER - ANNULUS_INNER);
    (-1.0 / (x * (1.0 - x))).exp()
}

/// The radial profile `φ(ρ) = ψ(ρ) / Σ_{m∈ℤ} ψ(2^{-m} ρ)`.
///
/// Only `|m| <= 1` can contribute inside the annulus; the denominator is
/// summed over `|m| <= 3` in increasing order of the argument, so `φ(ρ)` and
/// `φ(2ρ)` share a bit-identical denominator and `Σ_j φ(2^{-j} ρ) = 1` up to
/// the final divisions.
pub fn dyadic_profile(rho: f64) -> f64 {
    let numerator = bump(rho);
    if numerator == 0.0 {
        return 0.0;
    }
    let denominator: f64 = OCTAVES.iter().map(|s| bump(rho * s)).sum();
    numerator / denominator
}

/// `φ(2^{-j}|k|)` tabulated over the lattice for each `j` in the band.
#[derive(Debug, Clone)]
pub struct FilterBank {
    grid: FrequencyGrid,
    j_min: i32,
    j_max: i32,
    values: Vec<Vec<f64>>,
}

impl FilterBank {
    pub fn new(grid: FrequencyGrid, j_min: i32, j_max: i32) -> Result<Self> {
        if j_max - j_min < 3 {
            return Err(Error::FilterBand {
                j_min,
                j_max,
                reason: "need j_max - j_min >= 3".into(),
            });
        }
        let top = 2f64.powi(j_max) * ANNULUS_OUTER;
        if top > grid.nyquist() {
            return Err(Error::FilterBand {
                j_min,
                j_max,
                reason: format!(
                    "outer radius {top} of block {j_max} exceeds the Nyquist wavenumber {}",
                    grid.nyquist()
                ),
            });
        }
        let lattice = grid.lattice();
        let values = (j_min..=j_max)
            .map(|j| {
                let scale = 2f64.powi(-j);
                lattice.norm.iter().map(|r| dyadic_profile(r * scale)).collect()
            })
            .collect();
        Ok(Self {
            grid,
            j_min,
            j_max,
            values,
        })
    }

    /// The widest band the grid supports: `j_min` is the largest index
    /// whose shells exactly partition the lowest lattice wavenumber, `j_max`
    /// the largest whose annulus fits below Nyquist.
    pub fn resolved(grid: FrequencyGrid) -> Result<Self> {
        let j_min = (0.75 * grid.fundamental()).log2().floor() as i32;
        let j_max = (grid.nyquist() / ANNULUS_OUTER).log2().floor() as i32;
        Self::new(grid, j_min, j_max)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn indices(&self) -> RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn num_blocks(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    /// `[2^{j_min+1}, 2^{j_max-1}]`, the band on which the partition of
    /// unity is certified.
    pub fn interior_band(&self) -> (f64, f64) {
        (2f64.powi(self.j_min + 1), 2f64.powi(self.j_max - 1))
    }

    /// `[(4/3) 2^{j_min}, (3/2) 2^{j_max}]`: every wavenumber here is seen
    /// only by shells inside the band, so `Σ_j φ_j = 1` holds there too.
    pub fn exact_band(&self) -> (f64, f64) {
        (
            2f64.powi(self.j_min) / ANNULUS_INNER,
            ANNULUS_INNER * 2f64.powi(self.j_max + 1),
        )
    }

    pub fn check_block(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::BlockIndex {
                j,
                min: self.j_min,
                max: self.j_max,
            });
        }
        Ok(())
    }

    pub fn weights(&self, j: i32) -> Result<&[f64]> {
        self.check_block(j)?;
        Ok(&self.values[(j - self.j_min) as usize])
    }

    pub(crate) fn weights_unchecked(&self, j: i32) -> &[f64] {
        &self.values[(j - self.j_min) as usize]
    }

    /// Multiplier of `Ṡ_j`: the mean mode plus `Σ_{j_min <= k <= j-1} φ_k`.
    /// Indices at or below `j_min` give the mean alone.
    pub(crate) fn low_pass_weights_unchecked(&self, j: i32) -> Vec<f64> {
        let len = self.grid.len();
        let mut w = alloc::vec![0.0; len];
        w[0] = 1.0;
        for k in self.j_min..j.min(self.j_max + 1) {
            for (acc, v) in w.iter_mut().zip(self.weights_unchecked(k)) {
                *acc += v;
            }
        }
        w
    }

    pub fn check_low_pass(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max + 1 {
            return Err(Error::BlockIndex {
                j,
                min: self.j_min,
                max: self.j_max + 1,
            });
        }
        Ok(())
    }

    pub fn low_pass_weights(&self, j: i32) -> Result<Vec<f64>> {
        self.check_low_pass(j)?;
        Ok(self.low_pass_weights_unchecked(j))
    }

    fn check_grid(&self, grid: &FrequencyGrid) -> Result<()> {
        if *grid != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn block_spectral(&self, j: i32, field: &SpectralField) -> Result<SpectralField> {
        self.check_grid(field.grid())?;
        Ok(field.apply_weights(self.weights(j)?))
    }

    /// `Δ̇_j f`.
    pub fn dyadic_block(&self, j: i32, field: &Field) -> Result<Field> {
        self.check_grid(field.grid())?;
        Ok(self.block_spectral(j, &field.to_spectral())?.to_physical())
    }

    pub fn low_pass_spectral(&self, j: i32, field: &SpectralField) -> Result<SpectralField> {
        self.check_grid(field.grid())?;
        Ok(field.apply_weights(&self.low_pass_weights(j)?))
    }

    /// `Ṡ_j f`, for `j` in `[j_min, j_max + 1]`.
    pub fn low_pass(&self, j: i32, field: &Field) -> Result<Field> {
        self.check_grid(field.grid())?;
        Ok(self.low_pass_spectral(j, &field.to_spectral())?.to_physical())
    }

    /// Largest `|Σ_j φ_j(k) - 1|` over lattice points with `|k|` in `band`.
    pub fn partition_error(&self, band: (f64, f64)) -> f64 {
        let lattice = self.grid.lattice();
        let mut worst: f64 = 0.0;
        for (flat, r) in lattice.norm.iter().enumerate() {
            if *r < band.0 || *r > band.1 {
                continue;
            }
            let total: f64 = self.values.iter().map(|v| v[flat]).sum();
            worst = worst.max((total - 1.0).abs());
        }
        worst
    }

    /// Little-endian bytes of every tabulated value, block by block.
    pub fn value_bytes(&self) -> Vec<u8> {
        self.values
            .iter()
            .flat_map(|v| v.iter().flat_map(|x| x.to_le_bytes()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_band_limited, seeded};
    use crate::spectral::lp_norm;

    fn bank() -> FilterBank {
        FilterBank::resolved(FrequencyGrid::periodic(2, 64).unwrap()).unwrap()
    }

    #[test]
    fn resolved_band_on_default_grid() {
        let b = bank();
        assert_eq!((b.j_min(), b.j_max()), (-1, 3));
        assert_eq!(b.interior_band(), (1.0, 4.0));
        let (lo, hi) = b.exact_band();
        assert!((lo - 2.0 / 3.0).abs() < 1e-15 && (hi - 12.0).abs() < 1e-12);
    }

    #[test]
    fn profile_is_bounded_and_supported() {
        for i in 0..4000 {
            let rho = i as f64 * 0.001;
            let v = dyadic_profile(rho);
            assert!((0.0..=1.0).contains(&v));
            if rho <= ANNULUS_INNER || rho >= ANNULUS_OUTER {
                assert_eq!(v, 0.0);
            }
        }
        // plateau where neighbouring shells vanish
        assert_eq!(dyadic_profile(1.4), 1.0);
    }

    #[test]
    fn partition_of_unity() {
        let b = bank();
        assert!(b.partition_error(b.interior_band()) <= 1e-12);
        assert!(b.partition_error(b.exact_band()) <= 1e-12);
    }

    #[test]
    fn hard_zeros_and_overlap() {
        let b = bank();
        let lattice = b.grid().lattice();
        for (flat, r) in lattice.norm.iter().enumerate() {
            let active: Vec<i32> = b
                .indices()
                .filter(|&j| b.weights(j).unwrap()[flat] != 0.0)
                .collect();
            for &j in &active {
                let scale = 2f64.powi(j);
                assert!(*r > 0.75 * scale && *r < ANNULUS_OUTER * scale);
            }
            if active.len() == 2 {
                assert_eq!(active[1] - active[0], 1);
            }
            assert!(active.len() <= 2);
            if *r < 0.75 * 2f64.powi(b.j_min()) {
                assert!(active.is_empty());
            }
        }
    }

    #[test]
    fn disjoint_blocks_annihilate_exactly() {
        let b = bank();
        let g = *b.grid();
        let f = random_band_limited(&g, 1, 0.0, 30.0, &mut seeded(5));
        let spec = f.to_spectral();
        for j in b.indices() {
            for k in b.indices() {
                if (j - k).abs() < 2 {
                    continue;
                }
                let both = b
                    .block_spectral(j, &b.block_spectral(k, &spec).unwrap())
                    .unwrap()
                    .to_physical();
                assert!(both.samples().iter().all(|x| *x == 0.0));
            }
        }
    }

    #[test]
    fn low_pass_edge_cases() {
        let b = bank();
        let g = *b.grid();
        let (lo, hi) = b.exact_band();
        let mut f = random_band_limited(&g, 1, lo, hi, &mut seeded(9));
        f.samples_mut().iter_mut().for_each(|x| *x += 0.25);
        let full = b.low_pass(b.j_max() + 1, &f).unwrap();
        assert!(lp_norm(&full.sub(&f).unwrap(), 2.0).unwrap() <= 1e-10);
        let mean_only = b.low_pass(b.j_min(), &f).unwrap();
        assert!(mean_only.samples().iter().all(|x| (x - 0.25).abs() < 1e-12));
        assert!(b.low_pass(b.j_max() + 2, &f).is_err());
        assert!(b.dyadic_block(b.j_max() + 1, &f).is_err());

        // single mode at |k| = 2^{j+2} is invisible to Ṡ_j
        let j = 1;
        let mode = Field::from_fn(g, 1, |x, o| o[0] = (8.0 * x[0]).cos());
        let s = b.low_pass(j, &mode).unwrap();
        assert!(s.samples().iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn block_of_single_mode() {
        let b = bank();
        let g = *b.grid();
        let mode = Field::from_fn(g, 1, |x, o| o[0] = (4.0 * x[1]).sin());
        for j in b.indices() {
            let phi = dyadic_profile(4.0 * 2f64.powi(-j));
            let block = b.dyadic_block(j, &mode).unwrap();
            let expect = mode.scaled(phi);
            assert!(lp_norm(&block.sub(&expect).unwrap(), 2.0).unwrap() < 1e-14);
        }
    }

    #[test]
    fn band_validation() {
        let g = FrequencyGrid::periodic(2, 64).unwrap();
        assert!(FilterBank::new(g, -1, 4).is_err());
        assert!(FilterBank::new(g, 0, 2).is_err());
        assert!(FilterBank::new(g, -2, 3).is_ok());
    }
}
