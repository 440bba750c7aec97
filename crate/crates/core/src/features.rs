//! Random feature matrices.
//!
//! `A` is stored `m x N`: row `j` belongs to sample `x_j`, column `k` to
//! weight `w_k`. Both activations are kept in complex storage so the rest of
//! the crate works with `A*` uniformly.

use std::io::{self, Read, Write};

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{gaussian_matrix, Purpose, RngStream};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Fourier,
    Relu,
}

impl FeatureKind {
    pub fn code(self) -> u64 {
        match self {
            FeatureKind::Fourier => 0,
            FeatureKind::Relu => 1,
        }
    }

    pub fn from_code(code: u64) -> Option<Self> {
        match code {
            0 => Some(FeatureKind::Fourier),
            1 => Some(FeatureKind::Relu),
            _ => None,
        }
    }
}

impl std::str::FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(FeatureKind::Fourier),
            "relu" => Ok(FeatureKind::Relu),
            other => Err(Error::invalid(format!("unknown feature kind `{other}`"))),
        }
    }
}

/// Where a feature matrix came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub d: usize,
    pub m: usize,
    pub n: usize,
    /// Data standard deviation, when drawn by [`sample_features`].
    pub gamma: Option<f64>,
    /// Weight standard deviation, when drawn by [`sample_features`].
    pub sigma: Option<f64>,
    pub stream: Option<RngStream>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T: Real> {
    entries: DMatrix<Complex<T>>,
    kind: FeatureKind,
    meta: FeatureMeta,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex<T>> {
        self.entries
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn meta(&self) -> &FeatureMeta {
        &self.meta
    }

    /// Number of samples (rows).
    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of features (columns).
    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn with_provenance(mut self, gamma: f64, sigma: f64, stream: RngStream) -> Self {
        self.meta.gamma = Some(gamma);
        self.meta.sigma = Some(sigma);
        self.meta.stream = Some(stream);
        self
    }

    /// Writes the debugging dump: three little-endian u64 (m, N, kind code)
    /// followed by row-major interleaved (re, im) f64 pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.m() as u64).to_le_bytes())?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        w.write_all(&self.kind.code().to_le_bytes())?;
        for j in 0..self.m() {
            for k in 0..self.n() {
                let z = self.entries[(j, k)];
                w.write_all(&z.re.to_f64_lossy().to_le_bytes())?;
                w.write_all(&z.im.to_f64_lossy().to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a dump written by [`write_binary`](Self::write_binary). The
    /// dimension `d` is not stored and comes back as 0.
    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> io::Result<u64> {
            r.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let m = next(&mut r)? as usize;
        let n = next(&mut r)? as usize;
        let code = next(&mut r)?;
        let kind = FeatureKind::from_code(code)
            .ok_or_else(|| Error::invalid(format!("unknown feature kind code {code}")))?;
        if m == 0 || n == 0 {
            return Err(Error::invalid("dump has an empty dimension"));
        }
        let mut entries = DMatrix::zeros(m, n);
        for j in 0..m {
            for k in 0..n {
                let re = f64::from_bits(next(&mut r)?);
                let im = f64::from_bits(next(&mut r)?);
                entries[(j, k)] = Complex::new(T::lit(re), T::lit(im));
            }
        }
        let meta = FeatureMeta { d: 0, m, n, gamma: None, sigma: None, stream: None };
        Ok(FeatureMatrix { entries, kind, meta })
    }
}

fn check_shapes<T: Real>(x: &DMatrix<T>, w: &DMatrix<T>) -> Result<()> {
    if x.nrows() != w.nrows() {
        return Err(Error::invalid(format!(
            "data has dimension {} but weights have dimension {}",
            x.nrows(),
            w.nrows()
        )));
    }
    if x.nrows() == 0 || x.ncols() == 0 || w.ncols() == 0 {
        return Err(Error::invalid("data and weights must be non-empty"));
    }
    Ok(())
}

fn bare_meta<T: Real>(x: &DMatrix<T>, w: &DMatrix<T>) -> FeatureMeta {
    FeatureMeta { d: x.nrows(), m: x.ncols(), n: w.ncols(), gamma: None, sigma: None, stream: None }
}

/// `a_{jk} = exp(i <x_j, w_k>)` for data `X` (d x m) and weights `W` (d x N).
pub fn fourier_features<T: Real>(x: &DMatrix<T>, w: &DMatrix<T>) -> Result<FeatureMatrix<T>> {
    check_shapes(x, w)?;
    let phase = x.tr_mul(w);
    let entries = phase.map(|t| Complex::new(t.cos(), t.sin()));
    Ok(FeatureMatrix { entries, kind: FeatureKind::Fourier, meta: bare_meta(x, w) })
}

/// `a_{jk} = max(0, <x_j, w_k>)`.
pub fn relu_features<T: Real>(x: &DMatrix<T>, w: &DMatrix<T>) -> Result<FeatureMatrix<T>> {
    check_shapes(x, w)?;
    let phase = x.tr_mul(w);
    let entries = phase.map(|t| Complex::new(if t > T::zero() { t } else { T::zero() }, T::zero()));
    Ok(FeatureMatrix { entries, kind: FeatureKind::Relu, meta: bare_meta(x, w) })
}

pub fn build_features<T: Real>(kind: FeatureKind, x: &DMatrix<T>, w: &DMatrix<T>) -> Result<FeatureMatrix<T>> {
    match kind {
        FeatureKind::Fourier => fourier_features(x, w),
        FeatureKind::Relu => relu_features(x, w),
    }
}

/// Feature value for a single (sample, weight) inner product.
#[inline]
pub fn activation<T: Real>(kind: FeatureKind, t: T) -> Complex<T> {
    match kind {
        FeatureKind::Fourier => Complex::new(t.cos(), t.sin()),
        FeatureKind::Relu => Complex::new(if t > T::zero() { t } else { T::zero() }, T::zero()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `A / sqrt(m)`
    ByRows,
    /// `A / sqrt(N)`
    ByCols,
}

pub fn normalized<T: Real>(a: &FeatureMatrix<T>, mode: Normalization) -> DMatrix<Complex<T>> {
    let count = match mode {
        Normalization::ByRows => a.m(),
        Normalization::ByCols => a.n(),
    };
    let scale = T::one() / T::from_usize_lossy(count).sqrt();
    a.entries.map(|z| z.scale(scale))
}

/// Data, weights and the feature matrix of one random draw.
#[derive(Debug, Clone)]
pub struct FeatureDraw<T: Real> {
    pub x: DMatrix<T>,
    pub w: DMatrix<T>,
    pub features: FeatureMatrix<T>,
}

/// Draws `X ~ N(0, gamma^2 I)` (d x m) and `W ~ N(0, sigma^2 I)` (d x N) from
/// independent children of `stream` and builds the feature matrix.
pub fn sample_features<T: Real>(
    kind: FeatureKind,
    d: usize,
    m: usize,
    n: usize,
    gamma: T,
    sigma: T,
    stream: RngStream,
) -> Result<FeatureDraw<T>> {
    let x = gaussian_matrix(d, m, gamma * gamma, stream.derive(Purpose::Data))?;
    let w = gaussian_matrix(d, n, sigma * sigma, stream.derive(Purpose::Weights))?;
    let features = build_features(kind, &x, &w)?.with_provenance(
        gamma.to_f64_lossy(),
        sigma.to_f64_lossy(),
        stream,
    );
    Ok(FeatureDraw { x, w, features })
}
