//! In-place radix-2 FFT along every axis of a row-major `N^d` buffer.
//!
//! Forward transforms are unnormalized; the caller divides inverse results
//! by `N^d`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

pub(crate) struct Radix2 {
    n: usize,
    twiddles: Vec<Complex64>,
    reversed: Vec<usize>,
}

impl Radix2 {
    pub(crate) fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let bits = n.trailing_zeros();
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        let reversed = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Self {
            n,
            twiddles,
            reversed,
        }
    }

    pub(crate) fn process(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        for i in 0..n {
            let r = self.reversed[i];
            if r > i {
                buf.swap(i, r);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Transforms `data` (length `n^dim`) along every axis.
pub(crate) fn transform(data: &mut [Complex64], n: usize, dim: usize, inverse: bool) {
    let plan = Radix2::new(n);
    let total = data.len();
    debug_assert_eq!(total, n.pow(dim as u32));
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                plan.process(chunk, inverse);
            }
            continue;
        }
        let block = stride * n;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                plan.process(&mut line, inverse);
                for (i, value) in line.iter().enumerate() {
                    data[base + i * stride] = *value;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(input: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = input.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        (0..n)
            .map(|k| {
                input
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let angle = sign * 2.0 * PI * (j * k % n) as f64 / n as f64;
                        x * Complex64::new(angle.cos(), angle.sin())
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for n in [8usize, 16, 64] {
            let input: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos() - 0.2))
                .collect();
            for inverse in [false, true] {
                let mut fast = input.clone();
                Radix2::new(n).process(&mut fast, inverse);
                let slow = naive_dft(&input, inverse);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-12 * n as f64, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn multidimensional_matches_separable_naive() {
        let n = 8;
        let input: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.71).cos(), (i as f64 * 0.11).sin()))
            .collect();
        let mut fast = input.clone();
        transform(&mut fast, n, 2, false);
        for k0 in 0..n {
            for k1 in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j0 in 0..n {
                    for j1 in 0..n {
                        let angle = -2.0 * PI * ((j0 * k0 + j1 * k1) % n) as f64 / n as f64;
                        acc += input[j0 * n + j1] * Complex64::new(angle.cos(), angle.sin());
                    }
                }
                assert!((acc - fast[k0 * n + k1]).norm() < 1e-11);
            }
        }
    }
}
