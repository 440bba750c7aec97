//! Monte Carlo study of the Gram spectrum at the interpolation threshold.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::{draw_trial, run_ordered, Stats};
use crate::error::{Error, Result};
use crate::sampling::split_stream;
use crate::spectral::{gram_spectrum_of, Side};
use crate::theory::{interpolation_expectation_bounds, markov_threshold};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCell {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub lambda_min: Stats,
    pub lambda_max: Stats,
    /// Closed-form upper bound on `E lambda_min`.
    pub lambda_min_upper: f64,
    /// Closed-form lower bound on `E lambda_max`, `2 - 1/N`.
    pub lambda_max_lower: f64,
    /// Mean `lambda_min <= upper + 3 SE`.
    pub lambda_min_ok: bool,
    /// Mean `lambda_max >= lower - 3 SE`.
    pub lambda_max_ok: bool,
    pub markov_threshold: f64,
    /// Fraction of trials with `lambda_min >= markov_threshold`.
    pub markov_fraction: f64,
    /// `N^(-1/2)`, the bound on that probability.
    pub markov_probability: f64,
    /// Fraction `<= probability + 3 SE`.
    pub markov_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub cells: Vec<ThresholdCell>,
    /// Median `lambda_min` strictly decreasing along the grid.
    pub lambda_min_decreasing: bool,
}

/// Square systems `m = N` for each N of the grid: extreme eigenvalues of
/// `(1/N) A*A` over `cfg.trials` draws against their closed-form bounds.
pub fn run_threshold_study(cfg: &ExperimentConfig) -> Result<ThresholdReport> {
    cfg.validate()?;
    if cfg.n_grid[0] < 2 {
        return Err(Error::invalid("threshold study needs N >= 2"));
    }
    let trials = cfg.trials;
    let eig = run_ordered(cfg.workers, cfg.n_grid.len() * trials, |u| {
        let n = cfg.n_grid[u / trials];
        let stream = split_stream(cfg.seed, (u % trials) as u64).derive_index(n as u64);
        let data = draw_trial(cfg.features, cfg.d, n, n, n, cfg.gamma, cfg.sigma, stream)?;
        let s = gram_spectrum_of(&data.a, Side::Columns)?;
        Ok((s.lambda_min, s.lambda_max))
    })?;

    let mut cells = Vec::with_capacity(cfg.n_grid.len());
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let chunk = &eig[i * trials..(i + 1) * trials];
        let mins: Vec<f64> = chunk.iter().map(|e| e.0).collect();
        let maxs: Vec<f64> = chunk.iter().map(|e| e.1).collect();
        let lmin = Stats::of(&mins);
        let lmax = Stats::of(&maxs);
        let (upper, lower) = interpolation_expectation_bounds(n, cfg.gamma, cfg.sigma, cfg.d)?;
        let level = markov_threshold(n, cfg.gamma, cfg.sigma, cfg.d);
        let fraction = mins.iter().filter(|&&v| v >= level).count() as f64 / trials as f64;
        let prob = 1.0 / (n as f64).sqrt();
        let se = (prob * (1.0 - prob) / trials as f64).sqrt();
        cells.push(ThresholdCell {
            n,
            d: cfg.d,
            trials,
            lambda_min: lmin,
            lambda_max: lmax,
            lambda_min_upper: upper,
            lambda_max_lower: lower,
            lambda_min_ok: lmin.mean <= upper + 3.0 * lmin.se,
            lambda_max_ok: lmax.mean >= lower - 3.0 * lmax.se,
            markov_threshold: level,
            markov_fraction: fraction,
            markov_probability: prob,
            markov_ok: fraction <= prob + 3.0 * se,
        });
    }
    let lambda_min_decreasing = cells.windows(2).all(|w| w[1].lambda_min.median < w[0].lambda_min.median);
    Ok(ThresholdReport { cells, lambda_min_decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_study_is_consistent() {
        let cfg = ExperimentConfig {
            d: 2,
            n_grid: vec![5, 10],
            gamma: 1.0,
            sigma: 1.0,
            trials: 40,
            ..Default::default()
        };
        let r = run_threshold_study(&cfg).unwrap();
        assert_eq!(r.cells.len(), 2);
        for c in &r.cells {
            assert!(c.lambda_min.mean >= 0.0 && c.lambda_min.mean <= 1.0);
            assert!(c.lambda_max.mean >= 1.0);
            assert!((c.lambda_max_lower - (2.0 - 1.0 / c.n as f64)).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&c.markov_fraction));
        }
    }

    #[test]
    fn rejects_single_feature() {
        let cfg = ExperimentConfig { n_grid: vec![1, 2], ..Default::default() };
        assert!(run_threshold_study(&cfg).is_err());
    }
}
