//! Experiment harness composing the numerical modules into reproducible
//! studies. Everything here runs in `f64`.
//!
//! Trials are independent units keyed by `split_stream(seed, unit)`; they run
//! on a dedicated rayon pool and are collected in unit order, so outputs do
//! not depend on the worker count.

pub mod config;
pub mod output;
pub mod rip;
pub mod spectrum;
pub mod sweep;
pub mod threshold;
pub mod validation;

use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{build_features, FeatureKind};
use crate::sampling::{gaussian_matrix, noise_vector, NoiseModel, Purpose, RngStream};
use crate::solvers::{least_squares, min_norm_interpolate, pseudoinverse_solve, CoefficientVector};

pub use config::{parse_grid, ExperimentConfig, NoiseChoice, TargetChoice};
pub use rip::{run_rip_study, RipReport};
pub use spectrum::{run_spectrum_density, Scaling, SpectrumReport};
pub use sweep::{run_double_descent_sweep, SummaryRow, SweepResult, SweepRow};
pub use threshold::{run_threshold_study, ThresholdReport};
pub use validation::{run_bound_validation, ValidationConfig, ValidationReport};

/// Version tag carried by every JSON report.
pub const REPORT_VERSION: &str = "rfcond-report/1";

/// Runs `f(0..count)` on a pool of `workers` threads and returns the results
/// in index order. The first error in index order wins.
pub fn run_ordered<R, F>(workers: usize, count: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> Result<R> + Sync + Send,
{
    if workers == 0 {
        return Err(Error::invalid("workers must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<R>> = pool.install(|| (0..count).into_par_iter().map(&f).collect());
    results.into_iter().collect()
}

/// Training data of one trial: points, weights and feature matrix.
pub struct TrialData {
    pub x: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub a: DMatrix<Complex<f64>>,
}

/// Draws `m` points and the first `n` columns of a `d x n_max` weight
/// matrix, so that the weights of one trial are nested across `n`.
#[allow(clippy::too_many_arguments)]
pub fn draw_trial(
    kind: FeatureKind,
    d: usize,
    m: usize,
    n: usize,
    n_max: usize,
    gamma: f64,
    sigma: f64,
    stream: RngStream,
) -> Result<TrialData> {
    let x = gaussian_matrix(d, m, gamma * gamma, stream.derive(Purpose::Data))?;
    let w_all = gaussian_matrix(d, n_max.max(n), sigma * sigma, stream.derive(Purpose::Weights))?;
    let w = w_all.columns(0, n).into_owned();
    let a = build_features(kind, &x, &w)?.into_entries();
    Ok(TrialData { x, w, a })
}

/// Adds real noise to the outputs.
pub fn add_noise(f: &DVector<Complex<f64>>, model: &NoiseModel, stream: RngStream) -> Result<DVector<Complex<f64>>> {
    let e: DVector<f64> = noise_vector(f.len(), model, stream.derive(Purpose::Noise))?;
    Ok(DVector::from_iterator(f.len(), f.iter().zip(e.iter()).map(|(z, e)| Complex::new(z.re + e, z.im))))
}

/// Population standard deviation of the real parts.
pub fn output_std(f: &DVector<Complex<f64>>) -> f64 {
    let n = f.len() as f64;
    let mean = f.iter().map(|z| z.re).sum::<f64>() / n;
    (f.iter().map(|z| (z.re - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Least squares for `N < m`; the min-norm interpolator otherwise, falling
/// back to the pseudoinverse when the system is singular.
pub fn train(a: &DMatrix<Complex<f64>>, y: &DVector<Complex<f64>>) -> Result<CoefficientVector<f64>> {
    if a.ncols() < a.nrows() {
        least_squares(a, y)
    } else {
        match min_norm_interpolate(a, y) {
            Err(Error::Singular { .. }) => {
                let mut c = pseudoinverse_solve(a, y)?;
                c.diagnostics.rank_deficient = true;
                Ok(c)
            }
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub mean: f64,
    /// Standard error of the mean.
    pub se: f64,
    pub median: f64,
    pub count: usize,
}

impl Stats {
    /// Statistics of the finite values; `count` is how many there were.
    pub fn of(values: &[f64]) -> Stats {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        let n = v.len();
        if n == 0 {
            return Stats { mean: f64::NAN, se: f64::NAN, median: f64::NAN, count: 0 };
        }
        v.sort_by(f64::total_cmp);
        let mean = v.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Stats { mean, se, median, count: n }
    }
}

/// First index of the largest value, ignoring NaN.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(b) if values[b] >= *v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Min-max rescaling to `[0, 1]`; constant curves map to zero.
pub fn rescale(values: &[f64]) -> Vec<f64> {
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|v| {
            if !v.is_finite() {
                *v
            } else if hi > lo {
                (v - lo) / (hi - lo)
            } else {
                0.0
            }
        })
        .collect()
}

/// Envelope of every JSON report: version, command, echoed configuration,
/// then the command specific body.
#[derive(Debug, Clone, Serialize)]
pub struct Report<'a, C: Serialize, B: Serialize> {
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    #[serde(flatten)]
    pub body: &'a B,
}

impl<'a, C: Serialize, B: Serialize> Report<'a, C, B> {
    pub fn new(command: &'a str, config: &'a C, body: &'a B) -> Self {
        Report { version: REPORT_VERSION, command, config, body }
    }
}
