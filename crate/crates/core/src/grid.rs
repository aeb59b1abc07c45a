//! Uniform periodic grids and their wavenumber lattices.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// A uniform grid of `points^dim` samples on the torus `[0, length)^dim`.
///
/// Resolved wavenumbers are `k = (2π / length) · m` with
/// `m ∈ [-points/2, points/2)^dim`. Axis 0 is the slowest-varying index in
/// every sample buffer (row-major order).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrequencyGrid {
    dim: usize,
    points: usize,
    length: f64,
}

impl FrequencyGrid {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Dimension(dim));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::GridSize(points));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::BoxLength(length));
        }
        Ok(Self {
            dim,
            points,
            length,
        })
    }

    /// The `2π`-periodic box, the default throughout the crate.
    pub fn periodic(dim: usize, points: usize) -> Result<Self> {
        Self::new(dim, points, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of samples per component, `points^dim`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Lattice spacing in frequency, `2π / length`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Per-axis Nyquist wavenumber `π N / L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points as f64 / self.length
    }

    /// Largest per-axis mode index kept by the 2/3 dealiasing rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.points / 3) as i64
    }

    /// Signed mode index of position `i` along an axis.
    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Signed integer modes of a flat index; unused trailing axes are 0.
    pub fn modes(&self, flat: usize) -> [i64; 3] {
        let n = self.points;
        let mut out = [0i64; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = self.signed_mode(rest % n);
            rest /= n;
        }
        out
    }

    /// Physical coordinates of a flat sample index.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let n = self.points;
        let h = self.spacing();
        let mut out = [0.0; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = (rest % n) as f64 * h;
            rest /= n;
        }
        out
    }

    /// Flat index of a (possibly negative) mode vector.
    pub fn flat_index(&self, modes: &[i64]) -> usize {
        let n = self.points as i64;
        modes[..self.dim]
            .iter()
            .fold(0usize, |acc, &m| acc * self.points + m.rem_euclid(n) as usize)
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self)
    }
}

/// Precomputed per-mode tables for a grid.
///
/// `k` holds the wavevector used by first derivatives: components sitting on
/// the Nyquist index `-N/2` are set to zero so that odd derivatives of real
/// fields stay real. `k2` and `norm` use the true wavevector.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub grid: FrequencyGrid,
    pub k: Vec<[f64; 3]>,
    pub k2: Vec<f64>,
    pub norm: Vec<f64>,
    pub dealias: Vec<bool>,
}

impl Lattice {
    pub fn new(grid: &FrequencyGrid) -> Self {
        let len = grid.len();
        let k0 = grid.fundamental();
        let half = (grid.points() / 2) as i64;
        let cutoff = grid.dealias_cutoff();
        let mut k = Vec::with_capacity(len);
        let mut k2 = Vec::with_capacity(len);
        let mut norm = Vec::with_capacity(len);
        let mut dealias = Vec::with_capacity(len);
        for flat in 0..len {
            let m = grid.modes(flat);
            let mut kv = [0.0; 3];
            let mut sq = 0.0;
            let mut keep = true;
            for axis in 0..grid.dim() {
                let ka = m[axis] as f64 * k0;
                sq += ka * ka;
                kv[axis] = if m[axis] == -half { 0.0 } else { ka };
                keep &= m[axis].abs() <= cutoff;
            }
            k.push(kv);
            k2.push(sq);
            norm.push(sq.sqrt());
            dealias.push(keep);
        }
        Self {
            grid: *grid,
            k,
            k2,
            norm,
            dealias,
        }
    }

    pub fn len(&self) -> usize {
        self.k2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k2.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lattice_on_two_pi_box() {
        let g = FrequencyGrid::new(2, 8, 2.0 * PI).unwrap();
        assert_eq!(g.len(), 64);
        let lat = g.lattice();
        let mut seen = std::collections::BTreeSet::new();
        for flat in 0..g.len() {
            let m = g.modes(flat);
            assert!((-4..4).contains(&m[0]) && (-4..4).contains(&m[1]));
            assert_eq!(m[2], 0);
            seen.insert((m[0], m[1]));
            let expect = ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt();
            assert!((lat.norm[flat] - expect).abs() < 1e-15);
            assert_eq!(g.flat_index(&m), flat);
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn three_dimensional_lattice() {
        let g = FrequencyGrid::new(3, 16, 2.0 * PI).unwrap();
        assert_eq!(g.len(), 16 * 16 * 16);
        assert_eq!(g.modes(g.len() - 1), [-1, -1, -1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FrequencyGrid::new(2, 7, 1.0), Err(Error::GridSize(7)));
        assert_eq!(FrequencyGrid::new(4, 8, 1.0), Err(Error::Dimension(4)));
        assert_eq!(FrequencyGrid::new(2, 4, 1.0), Err(Error::GridSize(4)));
        assert!(FrequencyGrid::new(2, 8, 0.0).is_err());
        assert!(FrequencyGrid::new(2, 8, f64::NAN).is_err());
    }

    #[test]
    fn nyquist_derivative_wavevector_is_zeroed() {
        let g = FrequencyGrid::periodic(2, 8).unwrap();
        let lat = g.lattice();
        let flat = g.flat_index(&[-4, 3]);
        assert_eq!(lat.k[flat][0], 0.0);
        assert_eq!(lat.k[flat][1], 3.0);
        assert!((lat.k2[flat] - 25.0).abs() < 1e-12);
        assert!(!lat.dealias[flat]);
        assert_eq!(g.dealias_cutoff(), 2);
    }
}
