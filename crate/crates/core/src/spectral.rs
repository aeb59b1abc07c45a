//! Spectral calculus on the periodic grid: derivatives, the Leray projector,
//! the heat semigroup, Lebesgue norms and dealiased products.
//!
//! First derivatives multiply by `i k` with the Nyquist component of `k`
//! zeroed (see [`Lattice`]). The Leray projector and the divergence use the
//! same wavevector, so `div P f` vanishes mode by mode.
//!
//! Every pointwise product goes through the 2/3 rule: both factors are
//! truncated to `|m_i| <= N/3` on every axis, multiplied on the grid, and the
//! result truncated again. Within the kept band this is the exact product of
//! the truncated factors.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods take over when std is linked
use num_traits::Float;

use crate::field::{Field, SpectralField, TensorField};
use crate::grid::Lattice;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_axis(spectral: &SpectralField, axis: usize) -> Result<()> {
    let dim = spectral.grid().dim();
    if axis >= dim {
        return Err(Error::Axis { axis, dim });
    }
    Ok(())
}

/// `∂_axis` of every component.
pub fn spectral_derivative(field: &SpectralField, axis: usize) -> Result<SpectralField> {
    check_axis(field, axis)?;
    let lattice = field.grid().lattice();
    Ok(derivative_with(field, axis, &lattice))
}

pub(crate) fn derivative_with(field: &SpectralField, axis: usize, lattice: &Lattice) -> SpectralField {
    let mut out = field.clone();
    let len = lattice.len();
    for chunk in out.coefficients_mut().chunks_exact_mut(len) {
        for (z, k) in chunk.iter_mut().zip(&lattice.k) {
            *z *= I * k[axis];
        }
    }
    out
}

/// Multiplies every mode by `Π_a (i k_a)^{α_a}`.
pub fn spectral_multi_derivative(field: &SpectralField, alpha: &[u32]) -> Result<SpectralField> {
    let dim = field.grid().dim();
    if alpha.len() != dim {
        return Err(Error::Axis {
            axis: alpha.len(),
            dim,
        });
    }
    let lattice = field.grid().lattice();
    let mut out = field.clone();
    let len = lattice.len();
    for chunk in out.coefficients_mut().chunks_exact_mut(len) {
        for (z, k) in chunk.iter_mut().zip(&lattice.k) {
            let mut factor = Complex64::new(1.0, 0.0);
            for (axis, &order) in alpha.iter().enumerate() {
                for _ in 0..order {
                    factor *= I * k[axis];
                }
            }
            *z *= factor;
        }
    }
    Ok(out)
}

/// Gradient of every component: entry `c * d + a` holds `∂_a f_c`.
pub fn gradient_spectral(field: &SpectralField) -> SpectralField {
    let lattice = field.grid().lattice();
    gradient_with(field, &lattice)
}

pub(crate) fn gradient_with(field: &SpectralField, lattice: &Lattice) -> SpectralField {
    let d = field.grid().dim();
    let len = lattice.len();
    let mut out = SpectralField::zeros(*field.grid(), field.components() * d);
    for c in 0..field.components() {
        let src = field.component(c);
        for a in 0..d {
            let dst = out.component_mut(c * d + a);
            for flat in 0..len {
                dst[flat] = src[flat] * (I * lattice.k[flat][a]);
            }
        }
    }
    out
}

pub fn gradient(field: &Field) -> Field {
    gradient_spectral(&field.to_spectral()).to_physical()
}

/// `∇v` of a vector field as a tensor, entry `(i, j) = ∂_j v_i`.
pub fn gradient_tensor(field: &Field) -> Result<TensorField> {
    ensure_vector(field.components(), field.grid().dim())?;
    TensorField::from_entries(gradient(field))
}

fn ensure_vector(components: usize, dim: usize) -> Result<()> {
    if components != dim {
        return Err(Error::Components {
            expected: dim,
            found: components,
        });
    }
    Ok(())
}

pub fn divergence_spectral(field: &SpectralField) -> Result<SpectralField> {
    let d = field.grid().dim();
    ensure_vector(field.components(), d)?;
    let lattice = field.grid().lattice();
    Ok(divergence_with(field, &lattice))
}

pub(crate) fn divergence_with(field: &SpectralField, lattice: &Lattice) -> SpectralField {
    let d = field.grid().dim();
    let len = lattice.len();
    let mut out = SpectralField::zeros(*field.grid(), 1);
    let dst = out.component_mut(0);
    for a in 0..d {
        let src = field.component(a);
        for flat in 0..len {
            dst[flat] += src[flat] * (I * lattice.k[flat][a]);
        }
    }
    out
}

pub fn divergence(field: &Field) -> Result<Field> {
    Ok(divergence_spectral(&field.to_spectral())?.to_physical())
}

/// Leray projection `F(k) - k (k·F(k)) / |k|²`.
///
/// Modes whose derivative wavevector vanishes (the mean and pure-Nyquist
/// modes) are left unchanged.
pub fn leray_project(field: &SpectralField) -> Result<SpectralField> {
    ensure_vector(field.components(), field.grid().dim())?;
    let lattice = field.grid().lattice();
    let mut out = field.clone();
    leray_in_place(&mut out, &lattice);
    Ok(out)
}

pub(crate) fn leray_in_place(field: &mut SpectralField, lattice: &Lattice) {
    let d = field.grid().dim();
    let len = lattice.len();
    let coefficients = field.coefficients_mut();
    for flat in 0..len {
        let k = &lattice.k[flat];
        let k2: f64 = k[..d].iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        let mut dot = Complex64::new(0.0, 0.0);
        for a in 0..d {
            dot += coefficients[a * len + flat] * k[a];
        }
        let dot = dot / k2;
        for a in 0..d {
            coefficients[a * len + flat] -= dot * k[a];
        }
    }
}

/// `e^{tΔ}`: multiplies mode `k` by `exp(-|k|² t)`.
pub fn heat_semigroup(field: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let lattice = field.grid().lattice();
    let weights: Vec<f64> = lattice.k2.iter().map(|k2| (-k2 * t).exp()).collect();
    Ok(field.apply_weights(&weights))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Exponent(p))
    }
}

/// Normalized-measure `L^p` norm, `(N^{-d} Σ_x |f(x)|^p)^{1/p}`, with the
/// pointwise Euclidean magnitude for vector fields; `p = ∞` is the max norm.
pub fn lp_norm(field: &Field, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_norm_unchecked(field, p))
}

pub(crate) fn lp_norm_unchecked(field: &Field, p: f64) -> f64 {
    let len = field.grid().len();
    let c = field.components();
    let data = field.samples();
    let magnitude_sq = |i: usize| -> f64 { (0..c).map(|k| data[k * len + i].powi(2)).sum() };
    if p.is_infinite() {
        return (0..len).map(|i| magnitude_sq(i)).fold(0.0, f64::max).sqrt();
    }
    if p == 2.0 {
        let total: f64 = (0..len).map(magnitude_sq).sum();
        return (total / len as f64).sqrt();
    }
    let total: f64 = (0..len).map(|i| magnitude_sq(i).sqrt().powf(p)).sum();
    (total / len as f64).powf(1.0 / p)
}

/// `L^p` norm of the field represented by `spectral`. `p = 2` is evaluated
/// by Parseval without leaving Fourier space.
pub fn lp_norm_spectral(spectral: &SpectralField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_norm_spectral_unchecked(spectral, p))
}

pub(crate) fn lp_norm_spectral_unchecked(spectral: &SpectralField, p: f64) -> f64 {
    if p == 2.0 {
        spectral.energy().sqrt()
    } else {
        lp_norm_unchecked(&spectral.to_physical(), p)
    }
}

/// Zeroes every mode outside the 2/3 band.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let lattice = field.grid().lattice();
    let mut out = field.clone();
    mask_in_place(&mut out, &lattice);
    out
}

pub(crate) fn mask_in_place(field: &mut SpectralField, lattice: &Lattice) {
    let len = lattice.len();
    for chunk in field.coefficients_mut().chunks_exact_mut(len) {
        mask_slice(chunk, lattice);
    }
}

pub(crate) fn mask_slice(chunk: &mut [Complex64], lattice: &Lattice) {
    for (z, keep) in chunk.iter_mut().zip(&lattice.dealias) {
        if !keep {
            *z = Complex64::new(0.0, 0.0);
        }
    }
}

/// Smallest and largest `|k|` carrying a nonzero coefficient.
pub(crate) fn support_radii(chunk: &[Complex64], lattice: &Lattice) -> Option<(f64, f64)> {
    let mut range: Option<(f64, f64)> = None;
    for (z, r) in chunk.iter().zip(&lattice.norm) {
        if z.re != 0.0 || z.im != 0.0 {
            range = Some(match range {
                None => (*r, *r),
                Some((lo, hi)) => (lo.min(*r), hi.max(*r)),
            });
        }
    }
    range
}

/// Support annulus of a product of factors supported in the given annuli.
pub(crate) fn product_annulus(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let lower = (a.0 - b.1).max(b.0 - a.1).max(0.0);
    (lower, a.1 + b.1)
}

/// Zeroes coefficients outside `[lower, upper]`. The modes removed are
/// exactly zero for the true product, so only roundoff is discarded.
pub(crate) fn trim_to_annulus(chunk: &mut [Complex64], lattice: &Lattice, annulus: (f64, f64)) {
    let slack = 1e-9 * lattice.grid.fundamental();
    for (z, r) in chunk.iter_mut().zip(&lattice.norm) {
        if *r > annulus.1 + slack || *r < annulus.0 - slack {
            *z = Complex64::new(0.0, 0.0);
        }
    }
}

pub(crate) fn forward_in_place(chunk: &mut [Complex64], lattice: &Lattice) {
    let g = lattice.grid;
    crate::fft::transform(chunk, g.points(), g.dim(), false);
}

/// Real samples of one spectral component (already masked by the caller).
pub(crate) fn physical_component(chunk: &[Complex64], lattice: &Lattice) -> Vec<f64> {
    let g = lattice.grid;
    let mut work = chunk.to_vec();
    crate::fft::transform(&mut work, g.points(), g.dim(), true);
    let norm = 1.0 / g.len() as f64;
    work.iter().map(|z| z.re * norm).collect()
}

pub(crate) fn masked_physical(field: &SpectralField, lattice: &Lattice) -> Vec<Vec<f64>> {
    (0..field.components())
        .map(|c| {
            let mut chunk = field.component(c).to_vec();
            mask_slice(&mut chunk, lattice);
            physical_component(&chunk, lattice)
        })
        .collect()
}

/// Forward transform of real samples followed by the dealiasing mask.
pub(crate) fn masked_spectrum(samples: &[f64], lattice: &Lattice) -> Vec<Complex64> {
    let mut chunk: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward_in_place(&mut chunk, lattice);
    mask_slice(&mut chunk, lattice);
    chunk
}

/// Dealiased pointwise product. Components multiply pairwise; a scalar
/// factor broadcasts against a vector.
///
/// Coefficients outside the support annulus implied by the (masked) factors
/// are set to exact zeros.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let components = match (a.components(), b.components()) {
        (x, y) if x == y => x,
        (1, y) => y,
        (x, 1) => x,
        (x, y) => {
            return Err(Error::Components {
                expected: x,
                found: y,
            })
        }
    };
    let lattice = a.grid().lattice();
    let mut a_masked = a.clone();
    mask_in_place(&mut a_masked, &lattice);
    let mut b_masked = b.clone();
    mask_in_place(&mut b_masked, &lattice);
    let pick = |n: usize, c: usize| if n == 1 { 0 } else { c };
    let len = lattice.len();
    let mut out = SpectralField::zeros(*a.grid(), components);
    for c in 0..components {
        let ca = a_masked.component(pick(a.components(), c));
        let cb = b_masked.component(pick(b.components(), c));
        let (sa, sb) = match (support_radii(ca, &lattice), support_radii(cb, &lattice)) {
            (Some(sa), Some(sb)) => (sa, sb),
            _ => continue,
        };
        let pa = physical_component(ca, &lattice);
        let pb = physical_component(cb, &lattice);
        let dst = out.component_mut(c);
        for i in 0..len {
            dst[i] = Complex64::new(pa[i] * pb[i], 0.0);
        }
        forward_in_place(dst, &lattice);
        mask_slice(dst, &lattice);
        trim_to_annulus(dst, &lattice, product_annulus(sa, sb));
    }
    Ok(out)
}

pub fn dealiased_product_physical(a: &Field, b: &Field) -> Result<Field> {
    Ok(dealiased_product(&a.to_spectral(), &b.to_spectral())?.to_physical())
}

/// Dealiased `a ⊗ b` with `(a ⊗ b)_{ij} = a_i b_j`.
pub fn tensor_product(a: &Field, b: &Field) -> Result<TensorField> {
    let d = a.grid().dim();
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    ensure_vector(a.components(), d)?;
    ensure_vector(b.components(), d)?;
    let lattice = a.grid().lattice();
    let pa = masked_physical(&a.to_spectral(), &lattice);
    let pb = masked_physical(&b.to_spectral(), &lattice);
    let len = lattice.len();
    let mut entries = Field::zeros(*a.grid(), d * d);
    for i in 0..d {
        for j in 0..d {
            let product: Vec<f64> = (0..len).map(|x| pa[i][x] * pb[j][x]).collect();
            let spec = masked_spectrum(&product, &lattice);
            let phys = physical_component(&spec, &lattice);
            entries.component_mut(i * d + j).copy_from_slice(&phys);
        }
    }
    TensorField::from_entries(entries)
}

/// `div(a ⊗ b)` with `(div M)_i = Σ_j ∂_j M_{ij}`, in Fourier space.
///
/// When `div b = 0` this equals `(b·∇) a`.
pub fn tensor_divergence_spectral(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let d = a.grid().dim();
    ensure_vector(a.components(), d)?;
    ensure_vector(b.components(), d)?;
    let lattice = a.grid().lattice();
    let pa = masked_physical(a, &lattice);
    let pb = masked_physical(b, &lattice);
    Ok(tensor_divergence_from_physical(&pa, &pb, &lattice))
}

/// Same as [`tensor_divergence_spectral`] for factors already masked and
/// brought to the grid.
pub(crate) fn tensor_divergence_from_physical(
    pa: &[Vec<f64>],
    pb: &[Vec<f64>],
    lattice: &Lattice,
) -> SpectralField {
    let grid = lattice.grid;
    let d = grid.dim();
    let len = lattice.len();
    let mut out = SpectralField::zeros(grid, d);
    let mut product = vec![0.0; len];
    for i in 0..d {
        for j in 0..d {
            for x in 0..len {
                product[x] = pa[i][x] * pb[j][x];
            }
            let spec = masked_spectrum(&product, lattice);
            let dst = out.component_mut(i);
            for flat in 0..len {
                dst[flat] += spec[flat] * (I * lattice.k[flat][j]);
            }
        }
    }
    out
}

pub fn tensor_divergence(a: &Field, b: &Field) -> Result<Field> {
    Ok(tensor_divergence_spectral(&a.to_spectral(), &b.to_spectral())?.to_physical())
}

/// Normalized L² inner product `N^{-d} Σ_x a(x)·b(x)`.
pub fn inner_product(a: &Field, b: &Field) -> Result<f64> {
    a.ensure_compatible(b)?;
    let len = a.grid().len() as f64;
    Ok(a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| x * y)
        .sum::<f64>()
        / len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::random::{random_band_limited, seeded};
    use core::f64::consts::PI;

    fn grid(n: usize) -> FrequencyGrid {
        FrequencyGrid::periodic(2, n).unwrap()
    }

    fn l2(f: &Field) -> f64 {
        lp_norm(f, 2.0).unwrap()
    }

    #[test]
    fn derivative_of_cosine_is_minus_sine() {
        let g = grid(16);
        let f = Field::from_fn(g, 1, |x, o| o[0] = x[0].cos());
        let df = spectral_derivative(&f.to_spectral(), 0).unwrap().to_physical();
        let expect = Field::from_fn(g, 1, |x, o| o[0] = -x[0].sin());
        assert!(l2(&df.sub(&expect).unwrap()) < 1e-14);
        assert!(spectral_derivative(&f.to_spectral(), 2).is_err());
    }

    #[test]
    fn multi_derivative_scales_single_mode() {
        let g = grid(16);
        // cos(2 x0 + 3 x1): ∂0² ∂1 gives (2i)^2 (3i) = -12 i, i.e. 12 sin(...)
        let f = Field::from_fn(g, 1, |x, o| o[0] = (2.0 * x[0] + 3.0 * x[1]).cos());
        let df = spectral_multi_derivative(&f.to_spectral(), &[2, 1]).unwrap().to_physical();
        let expect = Field::from_fn(g, 1, |x, o| o[0] = 12.0 * (2.0 * x[0] + 3.0 * x[1]).sin());
        assert!(l2(&df.sub(&expect).unwrap()) < 1e-12);
    }

    #[test]
    fn stream_function_field_is_divergence_free() {
        let g = grid(32);
        let mut rng = seeded(7);
        let psi = random_band_limited(&g, 1, 1.0, 10.0, &mut rng);
        let grad = gradient(&psi);
        let u = Field::stack(&[grad.extract(1).scaled(-1.0), grad.extract(0)]).unwrap();
        let div = divergence(&u).unwrap();
        assert!(l2(&div) < 1e-12 * l2(&u).max(1.0));
    }

    #[test]
    fn leray_kills_gradients_and_fixes_solenoidal_fields() {
        let g = grid(32);
        let mut rng = seeded(11);
        let q = random_band_limited(&g, 1, 1.0, 12.0, &mut rng);
        let grad_q = gradient(&q);
        let projected = leray_project(&grad_q.to_spectral()).unwrap().to_physical();
        assert!(l2(&projected) < 1e-12 * l2(&grad_q));

        let psi = random_band_limited(&g, 1, 1.0, 12.0, &mut rng);
        let gp = gradient(&psi);
        let w = Field::stack(&[gp.extract(1).scaled(-1.0), gp.extract(0)]).unwrap();
        let pw = leray_project(&w.to_spectral()).unwrap().to_physical();
        assert!(l2(&pw.sub(&w).unwrap()) < 1e-12 * l2(&w));
    }

    #[test]
    fn heat_semigroup_single_mode() {
        let g = grid(16);
        let f = Field::from_fn(g, 1, |x, o| o[0] = x[1].sin());
        let spec = f.to_spectral();
        assert_eq!(heat_semigroup(&spec, 0.0).unwrap(), spec);
        let decayed = heat_semigroup(&spec, 1.0).unwrap().to_physical();
        let expect = f.scaled((-1.0f64).exp());
        assert!(l2(&decayed.sub(&expect).unwrap()) < 1e-15);
        assert_eq!(heat_semigroup(&spec, -0.1), Err(Error::NegativeTime(-0.1)));
    }

    #[test]
    fn lp_norms_of_simple_fields() {
        let g = grid(32);
        let one = Field::from_fn(g, 1, |_, o| o[0] = 1.0);
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            assert!((lp_norm(&one, p).unwrap() - 1.0).abs() < 1e-14);
        }
        let c = Field::from_fn(g, 1, |x, o| o[0] = x[0].cos());
        assert!((lp_norm(&c, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((lp_norm(&c, 4.0).unwrap() - 0.375f64.powf(0.25)).abs() < 1e-14);
        assert!((lp_norm(&c, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lp_norm(&c, 0.5), Err(Error::Exponent(0.5)));
        // Parseval path agrees with the grid sum.
        let s = lp_norm_spectral(&c.to_spectral(), 2.0).unwrap();
        assert!((s - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn single_mode_product_closed_form() {
        // cos(x0) * cos(2 x1) = ½ cos(x0 + 2x1) + ½ cos(x0 - 2x1)
        // Factors are built from exact spectra so the support bookkeeping
        // sees no roundoff modes.
        let g = grid(16);
        let n2 = g.len() as f64;
        let single = |m: [i64; 2]| {
            let mut s = SpectralField::zeros(g, 1);
            for sign in [1, -1] {
                let flat = g.flat_index(&[sign * m[0], sign * m[1]]);
                s.coefficients_mut()[flat] = Complex64::new(n2 / 2.0, 0.0);
            }
            s
        };
        let a = single([1, 0]);
        let b = single([0, 2]);
        assert!(l2(&a.to_physical().sub(&Field::from_fn(g, 1, |x, o| o[0] = x[0].cos())).unwrap()) < 1e-15);
        let p = dealiased_product(&a, &b).unwrap();
        for (flat, z) in p.coefficients().iter().enumerate() {
            let m = g.modes(flat);
            if m[0].abs() == 1 && m[1].abs() == 2 {
                assert!((z.re - n2 / 4.0).abs() < 1e-10 && z.im.abs() < 1e-10);
            } else {
                assert_eq!(z.norm(), 0.0, "mode {m:?} should be trimmed to zero");
            }
        }
    }

    #[test]
    fn tensor_divergence_conventions() {
        let g = grid(32);
        let zero = Field::zeros(g, 2);
        assert!(l2(&tensor_divergence(&zero, &zero).unwrap()) == 0.0);

        // a = (cos x1, 0), b = (sin x0, cos x1 ... ) with div b = 0
        let a = Field::from_fn(g, 2, |x, o| {
            o[0] = (x[1]).cos();
            o[1] = (x[0] + x[1]).sin();
        });
        let b = Field::from_fn(g, 2, |x, o| {
            o[0] = (x[1]).sin();
            o[1] = (2.0 * x[0]).cos();
        });
        let lhs = tensor_divergence(&a, &b).unwrap();
        // (b·∇)a evaluated analytically
        let rhs = Field::from_fn(g, 2, |x, o| {
            let (b0, b1) = (x[1].sin(), (2.0 * x[0]).cos());
            o[0] = b1 * (-(x[1]).sin());
            o[1] = (b0 + b1) * (x[0] + x[1]).cos();
        });
        assert!(l2(&lhs.sub(&rhs).unwrap()) < 1e-10);
    }

    #[test]
    fn advection_is_energy_neutral() {
        let g = grid(32);
        let mut rng = seeded(3);
        let psi = random_band_limited(&g, 1, 1.0, 8.0, &mut rng);
        let gp = gradient(&psi);
        let a = Field::stack(&[gp.extract(1).scaled(-1.0), gp.extract(0)]).unwrap();
        let adv = tensor_divergence(&a, &a).unwrap();
        let ip = inner_product(&adv, &a).unwrap();
        assert!(ip.abs() <= 1e-8 * l2(&a).powi(3), "{ip}");
    }

    #[test]
    fn nyquist_free_derivative_keeps_fields_real() {
        let g = grid(8);
        let f = Field::from_fn(g, 1, |x, o| o[0] = (4.0 * x[0]).cos() + (x[1] * 3.0).sin());
        let spec = spectral_derivative(&f.to_spectral(), 0).unwrap();
        assert!(spec.conjugate_symmetry_error() < 1e-12);
        let _ = PI;
    }
}
