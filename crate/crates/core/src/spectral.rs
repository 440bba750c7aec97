//! Spectra of feature Gram matrices, condition numbers, restricted isometry
//! constants and kernel density curves of singular values.

use std::cmp::Ordering;

use itertools::Itertools;
use nalgebra::{Complex, ComplexField, DMatrix, SymmetricEigen, SVD};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::sampling::RngStream;
use crate::scalar::Real;

/// Relative singular value floor below which a matrix counts as rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Default cap on the number of supports enumerated by [`rip_constant_exact`].
pub const DEFAULT_SUPPORT_BUDGET: u64 = 2_000_000;

/// Grid size of [`spectral_density`].
pub const DENSITY_GRID: usize = 512;

const MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `(1/m) A* A`, of size N x N.
    Columns,
    /// `(1/N) A A*`, of size m x m.
    Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary<T: Real> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    pub lambda_min: T,
    pub lambda_max: T,
    /// `sqrt(lambda_max / lambda_min)`, infinite when `lambda_min <= 0`.
    pub cond_number: T,
    pub side: Side,
}

impl<T: Real> SpectralSummary<T> {
    fn from_sorted(eigenvalues: Vec<T>, side: Side) -> Self {
        let lambda_min = eigenvalues[0];
        let lambda_max = eigenvalues[eigenvalues.len() - 1];
        let cond_number = if lambda_min > T::zero() {
            (lambda_max / lambda_min).sqrt()
        } else {
            T::infinity()
        };
        SpectralSummary { eigenvalues, lambda_min, lambda_max, cond_number, side }
    }

    /// `max_k |lambda_k - 1|`, which equals `||G - I||_2` for the Gram matrix `G`.
    pub fn deviation(&self) -> T {
        let one = T::one();
        (self.lambda_min - one).abs().max((self.lambda_max - one).abs())
    }

    pub fn is_infinite(&self) -> bool {
        !self.cond_number.is_finite()
    }
}

fn sort_ascending<T: Real>(v: &mut [T]) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
}

/// FNV-1a over the bit patterns of the entries, for error reports.
pub fn matrix_hash<T: Real>(a: &DMatrix<Complex<T>>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(a.nrows() as u64);
    eat(a.ncols() as u64);
    for z in a.iter() {
        eat(z.re.to_f64_lossy().to_bits());
        eat(z.im.to_f64_lossy().to_bits());
    }
    h
}

fn hermitian_eigenvalues<T: Real>(g: DMatrix<Complex<T>>, context: &str) -> Result<Vec<T>> {
    let hash = matrix_hash(&g);
    let eig = SymmetricEigen::try_new(g, T::default_epsilon(), MAX_SWEEPS)
        .ok_or_else(|| Error::NumericalFailure { context: context.to_string(), matrix_hash: hash })?;
    let mut v: Vec<T> = eig.eigenvalues.iter().copied().collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure { context: context.to_string(), matrix_hash: hash });
    }
    sort_ascending(&mut v);
    Ok(v)
}

/// Eigenvalues of the normalized Gram matrix on `side`.
///
/// Only the smaller of `A*A` and `AA*` is decomposed; the missing
/// `|m - N|` eigenvalues are exact zeros.
pub fn gram_spectrum<T: Real>(a: &FeatureMatrix<T>, side: Side) -> Result<SpectralSummary<T>> {
    gram_spectrum_of(a.entries(), side)
}

pub fn gram_spectrum_of<T: Real>(a: &DMatrix<Complex<T>>, side: Side) -> Result<SpectralSummary<T>> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let (dim, count) = match side {
        Side::Columns => (n, m),
        Side::Rows => (m, n),
    };
    let scale = T::one() / T::from_usize_lossy(count);
    let mut g = if n <= m { a.ad_mul(a) } else { a * a.adjoint() };
    g.apply(|z| *z = z.scale(scale));
    let mut eig = hermitian_eigenvalues(g, "gram_spectrum")?;
    if eig.len() < dim {
        eig.extend(std::iter::repeat_n(T::zero(), dim - eig.len()));
        sort_ascending(&mut eig);
    }
    Ok(SpectralSummary::from_sorted(eig, side))
}

/// Spectral summary built from singular values rather than a Gram matrix.
///
/// The condition number is `sigma_max / sigma_min` with the [`RANK_TOL`]
/// floor, so it stays accurate far beyond the `1e8` ceiling a Gram-based
/// estimate has in double precision.
pub fn svd_spectrum<T: Real>(a: &DMatrix<Complex<T>>, side: Side) -> Result<SpectralSummary<T>> {
    let (m, n) = a.shape();
    let (dim, count) = match side {
        Side::Columns => (n, m),
        Side::Rows => (m, n),
    };
    let sv = singular_values(a)?;
    let scale = T::one() / T::from_usize_lossy(count);
    let mut eig: Vec<T> = sv.iter().map(|s| *s * *s * scale).collect();
    eig.extend(std::iter::repeat_n(T::zero(), dim - eig.len()));
    sort_ascending(&mut eig);
    let mut summary = SpectralSummary::from_sorted(eig, side);
    summary.cond_number = if dim > sv.len() { T::infinity() } else { cond_from_sorted(&sv) };
    Ok(summary)
}

/// Singular values in ascending order, `min(m, N)` of them.
///
/// Strongly rectangular inputs are first reduced to their square triangular
/// QR factor, which has the same singular values.
pub fn singular_values<T: Real>(a: &DMatrix<Complex<T>>) -> Result<Vec<T>> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let core = if m >= 2 * n {
        a.clone().qr().r()
    } else if n >= 2 * m {
        a.adjoint().qr().r()
    } else {
        a.clone()
    };
    let hash = matrix_hash(a);
    let svd = SVD::try_new(core, false, false, T::default_epsilon(), MAX_SWEEPS)
        .ok_or(Error::NumericalFailure { context: "singular_values".into(), matrix_hash: hash })?;
    let mut s: Vec<T> = svd.singular_values.iter().copied().collect();
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure { context: "singular_values".into(), matrix_hash: hash });
    }
    sort_ascending(&mut s);
    Ok(s)
}

fn cond_from_sorted<T: Real>(sv: &[T]) -> T {
    let smin = sv[0];
    let smax = sv[sv.len() - 1];
    if smax <= T::zero() || smin <= T::lit(RANK_TOL) * smax {
        T::infinity()
    } else {
        smax / smin
    }
}

/// `sigma_max / sigma_min`, or infinity when the matrix is numerically rank
/// deficient (`sigma_min <= 1e-12 sigma_max`).
pub fn condition_number<T: Real>(a: &DMatrix<Complex<T>>) -> Result<T> {
    let sv = singular_values(a)?;
    Ok(cond_from_sorted(&sv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RipMethod {
    ExactEnumeration,
    RandomizedLowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipEstimate<T: Real> {
    pub s: usize,
    pub value: T,
    pub method: RipMethod,
    pub supports_evaluated: u64,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn support_deviation<T: Real>(g: &DMatrix<Complex<T>>, support: &[usize]) -> Result<T> {
    let s = support.len();
    if s == 1 {
        let k = support[0];
        return Ok((g[(k, k)] - Complex::new(T::one(), T::zero())).modulus());
    }
    let mut sub = DMatrix::from_fn(s, s, |i, j| g[(support[i], support[j])]);
    for i in 0..s {
        sub[(i, i)].re -= T::one();
    }
    let eig = hermitian_eigenvalues(sub, "rip support")?;
    Ok(eig[0].abs().max(eig[s - 1].abs()))
}

fn check_rip_args<T: Real>(a: &DMatrix<Complex<T>>, s: usize) -> Result<()> {
    if s == 0 || s > a.ncols() {
        return Err(Error::invalid(format!("sparsity s = {s} must lie in 1..={}", a.ncols())));
    }
    Ok(())
}

fn enumerate_all<T: Real>(g: &DMatrix<Complex<T>>, n: usize, s: usize) -> Result<T> {
    (0..n)
        .combinations(s)
        .par_bridge()
        .map(|support| support_deviation(g, &support))
        .try_reduce(T::zero, |a, b| Ok(a.max(b)))
}

/// Exact `delta_s` of an already normalized matrix by enumerating every
/// support of size `s`.
pub fn rip_constant_exact<T: Real>(a: &DMatrix<Complex<T>>, s: usize) -> Result<RipEstimate<T>> {
    rip_constant_exact_with_budget(a, s, DEFAULT_SUPPORT_BUDGET)
}

pub fn rip_constant_exact_with_budget<T: Real>(
    a: &DMatrix<Complex<T>>,
    s: usize,
    budget: u64,
) -> Result<RipEstimate<T>> {
    check_rip_args(a, s)?;
    let n = a.ncols();
    let total = binomial(n, s);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { supports: total, budget });
    }
    let g = a.ad_mul(a);
    let value = enumerate_all(&g, n, s)?;
    Ok(RipEstimate { s, value, method: RipMethod::ExactEnumeration, supports_evaluated: total as u64 })
}

/// Lower bound on `delta_s` from `trials` random supports.
///
/// Supports are drawn in sequence from `stream`, so a run with more trials
/// sees a superset of the supports of a shorter run. When `trials` reaches
/// the number of supports the search switches to full enumeration and the
/// result is exact.
pub fn rip_constant_lower_mc<T: Real>(
    a: &DMatrix<Complex<T>>,
    s: usize,
    trials: u64,
    stream: RngStream,
) -> Result<RipEstimate<T>> {
    check_rip_args(a, s)?;
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let n = a.ncols();
    let g = a.ad_mul(a);
    let total = binomial(n, s);
    if trials as u128 >= total {
        let value = enumerate_all(&g, n, s)?;
        return Ok(RipEstimate {
            s,
            value,
            method: RipMethod::ExactEnumeration,
            supports_evaluated: total as u64,
        });
    }
    let mut rng = stream.rng();
    let supports: Vec<Vec<usize>> = (0..trials)
        .map(|_| {
            let mut idx = rand::seq::index::sample(&mut rng, n, s).into_vec();
            idx.sort_unstable();
            idx
        })
        .collect();
    let value = supports
        .par_iter()
        .map(|support| support_deviation(&g, support))
        .try_reduce(T::zero, |a, b| Ok(a.max(b)))?;
    Ok(RipEstimate { s, value, method: RipMethod::RandomizedLowerBound, supports_evaluated: trials })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// Silverman's rule of thumb.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityNorm {
    MaxOne,
    IntegralOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve<T: Real> {
    pub grid: Vec<T>,
    pub density: Vec<T>,
    pub bandwidth: T,
    pub normalization: DensityNorm,
}

fn quantile<T: Real>(sorted: &[T], p: f64) -> T {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = T::lit(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn silverman<T: Real>(values: &[T]) -> T {
    let n = values.len();
    let nf = T::from_usize_lossy(n);
    let mean = values.iter().fold(T::zero(), |a, b| a + *b) / nf;
    let sd = if n > 1 {
        let ss = values.iter().fold(T::zero(), |a, b| a + (*b - mean) * (*b - mean));
        (ss / T::from_usize_lossy(n - 1)).sqrt()
    } else {
        T::zero()
    };
    let mut sorted = values.to_vec();
    sort_ascending(&mut sorted);
    let iqr = (quantile(&sorted, 0.75) - quantile(&sorted, 0.25)) / T::lit(1.34);
    let spread = if iqr > T::zero() { sd.min(iqr) } else { sd };
    if spread > T::zero() {
        T::lit(0.9) * spread * nf.powf(T::lit(-0.2))
    } else {
        T::lit(0.1) * mean.abs().max(T::one())
    }
}

/// Gaussian kernel density on a 512 point grid over `[min - 3h, max + 3h]`.
pub fn spectral_density<T: Real>(
    values: &[T],
    bandwidth: Bandwidth,
    normalization: DensityNorm,
) -> Result<DensityCurve<T>> {
    if values.is_empty() {
        return Err(Error::invalid("density of an empty sample"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("density input contains non-finite values"));
    }
    let h = match bandwidth {
        Bandwidth::Auto => silverman(values),
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => T::lit(h),
        Bandwidth::Fixed(h) => return Err(Error::invalid(format!("bandwidth must be positive, got {h}"))),
    };
    let lo = values.iter().fold(values[0], |a, b| a.min(*b)) - T::lit(3.0) * h;
    let hi = values.iter().fold(values[0], |a, b| a.max(*b)) + T::lit(3.0) * h;
    let step = (hi - lo) / T::from_usize_lossy(DENSITY_GRID - 1);
    let grid: Vec<T> = (0..DENSITY_GRID).map(|i| lo + step * T::from_usize_lossy(i)).collect();
    let half = T::lit(0.5);
    let mut density: Vec<T> = grid
        .iter()
        .map(|&g| {
            values.iter().fold(T::zero(), |acc, &v| {
                let u = (g - v) / h;
                acc + (-half * u * u).exp()
            })
        })
        .collect();
    let denom = match normalization {
        DensityNorm::MaxOne => density.iter().fold(T::zero(), |a, b| a.max(*b)),
        DensityNorm::IntegralOne => trapezoid(&grid, &density),
    };
    for d in density.iter_mut() {
        *d /= denom;
    }
    Ok(DensityCurve { grid, density, bandwidth: h, normalization })
}

pub fn trapezoid<T: Real>(x: &[T], y: &[T]) -> T {
    let half = T::lit(0.5);
    x.windows(2)
        .zip(y.windows(2))
        .fold(T::zero(), |acc, (xs, ys)| acc + (xs[1] - xs[0]) * (ys[0] + ys[1]) * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{fourier_features, normalized, Normalization};
    use crate::sampling::{gaussian_matrix, split_stream};

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn random_complex(m: usize, n: usize, seed: u64) -> DMatrix<Complex<f64>> {
        let re = gaussian_matrix::<f64>(m, n, 1.0, split_stream(seed, 0)).unwrap();
        let im = gaussian_matrix::<f64>(m, n, 1.0, split_stream(seed, 1)).unwrap();
        DMatrix::from_fn(m, n, |i, j| Complex::new(re[(i, j)], im[(i, j)]))
    }

    fn fourier(m: usize, n: usize, d: usize, seed: u64) -> FeatureMatrix<f64> {
        let x = gaussian_matrix::<f64>(d, m, 1.0, split_stream(seed, 10)).unwrap();
        let w = gaussian_matrix::<f64>(d, n, 1.0, split_stream(seed, 11)).unwrap();
        fourier_features(&x, &w).unwrap()
    }

    #[test]
    fn single_column_has_unit_eigenvalue() {
        let a = fourier(7, 1, 2, 1);
        let s = gram_spectrum(&a, Side::Columns).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.cond_number - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_columns_flat_spectrum() {
        // two columns of the 4-point DFT
        let a = DMatrix::from_fn(4, 2, |j, k| {
            let t = std::f64::consts::FRAC_PI_2 * (j * k) as f64;
            Complex::new(t.cos(), t.sin())
        });
        let s = gram_spectrum_of(&a, Side::Columns).unwrap();
        assert!(s.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-14));
    }

    #[test]
    fn padding_on_the_large_side() {
        let a = fourier(5, 12, 3, 2);
        let cols = gram_spectrum(&a, Side::Columns).unwrap();
        assert_eq!(cols.eigenvalues.len(), 12);
        assert!(cols.eigenvalues[..7].iter().all(|&l| l == 0.0));
        assert!(cols.is_infinite());
        let rows = gram_spectrum(&a, Side::Rows).unwrap();
        assert_eq!(rows.eigenvalues.len(), 5);
        // the two sides differ by the factor N/m on the nonzero part
        for (r, c) in rows.eigenvalues.iter().zip(&cols.eigenvalues[7..]) {
            assert!((r * 12.0 / 5.0 - c).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_value_examples() {
        let id = DMatrix::<Complex<f64>>::identity(3, 3);
        assert_eq!(singular_values(&id).unwrap(), vec![1.0, 1.0, 1.0]);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), c(4.0)]));
        let s = singular_values(&d).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        for (m, n) in [(20, 5), (5, 20), (12, 9), (40, 3)] {
            let a = random_complex(m, n, (m * n) as u64);
            let sv = singular_values(&a).unwrap();
            let g = if n <= m { a.ad_mul(&a) } else { &a * a.adjoint() };
            let eig = hermitian_eigenvalues(g, "oracle").unwrap();
            for (s, l) in sv.iter().zip(&eig) {
                assert!((s * s - l).abs() <= 1e-8 * l.abs(), "{m}x{n}: {} vs {l}", s * s);
            }
        }
    }

    #[test]
    fn svd_and_gram_spectra_agree() {
        let a = fourier(30, 10, 2, 5);
        let e = gram_spectrum(&a, Side::Columns).unwrap();
        let s = svd_spectrum(a.entries(), Side::Columns).unwrap();
        for (x, y) in e.eigenvalues.iter().zip(&s.eigenvalues) {
            assert!((x - y).abs() <= 1e-8 * y.abs().max(1e-300));
        }
        assert!((e.cond_number - s.cond_number).abs() <= 1e-6 * s.cond_number);
    }

    #[test]
    fn condition_number_examples() {
        let id = DMatrix::<Complex<f64>>::identity(4, 4);
        assert!((condition_number(&id).unwrap() - 1.0).abs() < 1e-14);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(10.0)]));
        assert!((condition_number(&d).unwrap() - 10.0).abs() < 1e-12);
        let sing = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        assert!(condition_number(&sing).unwrap().is_infinite());
    }

    #[test]
    fn rip_single_column_is_zero() {
        let a = fourier(30, 8, 2, 3);
        let an = normalized(&a, Normalization::ByRows);
        let r = rip_constant_exact(&an, 1).unwrap();
        assert!(r.value < 1e-10);
        assert_eq!(r.supports_evaluated, 8);
    }

    #[test]
    fn rip_full_support_is_gram_deviation() {
        let a = fourier(30, 8, 2, 4);
        let an = normalized(&a, Normalization::ByRows);
        let r = rip_constant_exact(&an, 8).unwrap();
        let g = gram_spectrum(&a, Side::Columns).unwrap();
        assert!((r.value - g.deviation()).abs() < 1e-10);
    }

    #[test]
    fn rip_monotone_and_lower_bound() {
        let a = fourier(30, 8, 2, 6);
        let an = normalized(&a, Normalization::ByRows);
        let mut last = 0.0;
        for s in 1..=8 {
            let exact = rip_constant_exact(&an, s).unwrap();
            assert!(exact.value >= last - 1e-12);
            last = exact.value;
            let mc = rip_constant_lower_mc(&an, s, 5, split_stream(1, s as u64)).unwrap();
            assert!(mc.value <= exact.value + 1e-10);
        }
    }

    #[test]
    fn rip_mc_monotone_in_trials_and_exact_when_covering() {
        let a = fourier(30, 10, 2, 7);
        let an = normalized(&a, Normalization::ByRows);
        let st = split_stream(5, 0);
        let mut last = 0.0;
        for t in [1, 3, 10, 40, 100] {
            let v = rip_constant_lower_mc(&an, 3, t, st).unwrap().value;
            assert!(v >= last);
            last = v;
        }
        let full = rip_constant_lower_mc(&an, 3, 120, st).unwrap();
        let exact = rip_constant_exact(&an, 3).unwrap();
        assert_eq!(full.value, exact.value);
    }

    #[test]
    fn rip_budget_and_bad_s() {
        let a = fourier(10, 30, 2, 8);
        let an = normalized(&a, Normalization::ByRows);
        assert!(matches!(
            rip_constant_exact_with_budget(&an, 15, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(rip_constant_exact(&an, 0).is_err());
        assert!(rip_constant_exact(&an, 31).is_err());
    }

    #[test]
    fn rip_invariant_under_column_permutation() {
        let a = fourier(30, 7, 2, 9);
        let an = normalized(&a, Normalization::ByRows);
        let perm = [3usize, 0, 6, 2, 5, 1, 4];
        let p = DMatrix::from_fn(30, 7, |i, j| an[(i, perm[j])]);
        for s in [2, 4] {
            let x = rip_constant_exact(&an, s).unwrap().value;
            let y = rip_constant_exact(&p, s).unwrap().value;
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn density_of_single_value() {
        let d = spectral_density(&[2.0f64], Bandwidth::Auto, DensityNorm::MaxOne).unwrap();
        let (imax, _) = d
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        assert!((d.grid[imax] - 2.0).abs() <= d.grid[1] - d.grid[0]);
        for i in 0..DENSITY_GRID / 2 {
            assert!((d.density[i] - d.density[DENSITY_GRID - 1 - i]).abs() < 1e-9);
        }
    }

    #[test]
    fn density_normalizations() {
        let v: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64 / 10.0).collect();
        let d = spectral_density(&v, Bandwidth::Auto, DensityNorm::IntegralOne).unwrap();
        assert!((trapezoid(&d.grid, &d.density) - 1.0).abs() < 1e-3);
        assert!(d.density.iter().all(|x| *x >= 0.0));
        let d = spectral_density(&v, Bandwidth::Fixed(0.3), DensityNorm::MaxOne).unwrap();
        let max = d.density.iter().cloned().fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-9);
        assert!(spectral_density::<f64>(&[], Bandwidth::Auto, DensityNorm::MaxOne).is_err());
    }

    #[test]
    fn single_precision_spectrum() {
        let x = gaussian_matrix::<f32>(2, 20, 1.0, split_stream(1, 0)).unwrap();
        let w = gaussian_matrix::<f32>(2, 4, 1.0, split_stream(1, 1)).unwrap();
        let a = fourier_features(&x, &w).unwrap();
        let s = gram_spectrum(&a, Side::Columns).unwrap();
        assert!(s.lambda_min > 0.0 && s.lambda_max < 4.0);
        assert!(condition_number(a.entries()).unwrap() >= 1.0);
    }
}
