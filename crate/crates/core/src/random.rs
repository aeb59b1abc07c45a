//! Seeded random fields for the verification corpora.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::field::{Field, SpectralField};
use crate::grid::FrequencyGrid;
use crate::spectral::{lp_norm, leray_project};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample in `[-1, 1)`.
pub fn symmetric_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let bits = rng.next_u64() >> 11;
    2.0 * (bits as f64 / (1u64 << 53) as f64) - 1.0
}

/// A real field whose Fourier support lies in the annulus
/// `k_lo <= |k| <= k_hi`, with random coefficients of unit size.
///
/// The coefficients are drawn independently per mode and symmetrized by
/// taking the real part on the way back to the grid, so the support stays
/// inside the (symmetric) annulus.
pub fn random_band_limited<R: RngCore + ?Sized>(
    grid: &FrequencyGrid,
    components: usize,
    k_lo: f64,
    k_hi: f64,
    rng: &mut R,
) -> Field {
    let lattice = grid.lattice();
    let len = grid.len();
    let mut coefficients = Vec::with_capacity(components * len);
    for _ in 0..components {
        for flat in 0..len {
            let r = lattice.norm[flat];
            // Draw unconditionally so the stream does not depend on the band.
            let re = symmetric_unit(rng);
            let im = symmetric_unit(rng);
            if r >= k_lo && r <= k_hi && r > 0.0 {
                coefficients.push(Complex64::new(re, im) * len as f64);
            } else {
                coefficients.push(Complex64::new(0.0, 0.0));
            }
        }
    }
    SpectralField::from_coefficients(*grid, components, coefficients)
        .expect("consistent sizes")
        .to_physical()
}

/// A divergence-free vector field supported in `k_lo <= |k| <= k_hi`.
pub fn random_solenoidal<R: RngCore + ?Sized>(
    grid: &FrequencyGrid,
    k_lo: f64,
    k_hi: f64,
    rng: &mut R,
) -> Field {
    let raw = random_band_limited(grid, grid.dim(), k_lo, k_hi, rng);
    leray_project(&raw.to_spectral())
        .expect("vector field")
        .to_physical()
}

/// Rescales a field to the requested normalized L² norm (zero stays zero).
pub fn normalized(field: &Field, l2: f64) -> Field {
    let current = lp_norm(field, 2.0).expect("p = 2");
    if current == 0.0 {
        field.clone()
    } else {
        field.scaled(l2 / current)
    }
}
