//! Reproducible random sampling of data, weights and noise.
//!
//! Every draw goes through an [`RngStream`], a `(seed, stream_id)` pair that
//! maps onto one ChaCha8 keystream. ChaCha exposes 2^64 independent streams
//! per key, so trials keyed by distinct stream ids never overlap, and a trial
//! replays bit-identically no matter which worker thread runs it.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Label for one reproducible random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

/// Purposes used when one trial needs several independent sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Data = 1,
    Weights = 2,
    Noise = 3,
    Test = 4,
    Target = 5,
    Supports = 6,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Independent child stream for one purpose within the same trial.
    ///
    /// The child keeps the stream id and derives a new key, so children of
    /// distinct trials stay disjoint as well.
    pub fn derive(&self, purpose: Purpose) -> RngStream {
        let key = splitmix64(self.seed ^ splitmix64(purpose as u64));
        RngStream::new(key, self.stream_id)
    }

    /// Like [`derive`](Self::derive) but for an arbitrary integer label.
    pub fn derive_index(&self, label: u64) -> RngStream {
        let key = splitmix64(self.seed ^ splitmix64(label.wrapping_add(1 << 32)));
        RngStream::new(key, self.stream_id)
    }
}

/// Stream for trial `trial_id` under master seed `seed`.
pub fn split_stream(seed: u64, trial_id: u64) -> RngStream {
    RngStream::new(seed, trial_id)
}

/// Measurement noise law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "level", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// i.i.d. Uniform[-E, E].
    BoundedUniform(f64),
    /// i.i.d. N(0, nu^2).
    Gaussian(f64),
}

impl NoiseModel {
    pub fn bounded_uniform(level: f64) -> Result<Self> {
        check_level(level)?;
        Ok(NoiseModel::BoundedUniform(level))
    }

    pub fn gaussian(level: f64) -> Result<Self> {
        check_level(level)?;
        Ok(NoiseModel::Gaussian(level))
    }

    pub fn level(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::BoundedUniform(e) | NoiseModel::Gaussian(e) => e,
        }
    }

    /// Bound E entering the risk bounds. Gaussian noise is reported with the
    /// high-probability bound 2 nu; samples themselves are never truncated.
    pub fn effective_bound(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::BoundedUniform(e) => e,
            NoiseModel::Gaussian(nu) => 2.0 * nu,
        }
    }
}

fn check_level(level: f64) -> Result<()> {
    if level.is_finite() && level >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("noise level must be finite and non-negative, got {level}")))
    }
}

/// `rows x cols` matrix of i.i.d. N(0, variance) entries, filled column-major.
pub fn gaussian_matrix<T: Real>(
    rows: usize,
    cols: usize,
    variance: T,
    stream: RngStream,
) -> Result<DMatrix<T>> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid(format!("matrix dimensions must be positive, got {rows}x{cols}")));
    }
    if !(variance > T::zero()) || !variance.is_finite() {
        return Err(Error::invalid(format!("variance must be positive and finite, got {variance}")));
    }
    let std = variance.sqrt();
    let mut rng = stream.rng();
    Ok(DMatrix::from_fn(rows, cols, |_, _| std * T::standard_normal(&mut rng)))
}

pub fn noise_vector<T: Real>(m: usize, model: &NoiseModel, stream: RngStream) -> Result<DVector<T>> {
    if m == 0 {
        return Err(Error::invalid("noise vector length must be positive"));
    }
    check_level(model.level())?;
    let mut rng = stream.rng();
    let v = match *model {
        NoiseModel::None => DVector::zeros(m),
        NoiseModel::BoundedUniform(e) => {
            let e = T::lit(e);
            let two = T::lit(2.0);
            DVector::from_fn(m, |_, _| e * (two * T::unit_uniform(&mut rng) - T::one()))
        }
        NoiseModel::Gaussian(nu) => {
            let nu = T::lit(nu);
            DVector::from_fn(m, |_, _| nu * T::standard_normal(&mut rng))
        }
    };
    Ok(v)
}

/// Uniform[0,1)^len vector, used for the coefficients of linear targets.
pub fn uniform_vector<T: Real>(len: usize, stream: RngStream) -> DVector<T> {
    let mut rng = stream.rng();
    DVector::from_fn(len, |_, _| T::unit_uniform(&mut rng))
}
