//! Restricted isometry constants of small random Fourier instances.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::{draw_trial, run_ordered};
use crate::error::{Error, Result};
use crate::sampling::{split_stream, Purpose};
use crate::spectral::{
    binomial, gram_spectrum_of, rip_constant_exact_with_budget, rip_constant_lower_mc, RipMethod, Side,
    DEFAULT_SUPPORT_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RipOptions {
    /// Largest sparsity; `None` means N.
    pub s_max: Option<usize>,
    /// Random supports per lower bound.
    pub supports: u64,
    pub budget: u64,
}

impl Default for RipOptions {
    fn default() -> Self {
        RipOptions { s_max: None, supports: 50, budget: DEFAULT_SUPPORT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RipRow {
    pub s: usize,
    /// Exact `delta_s`, when the support count fits the budget.
    pub exact: Option<f64>,
    pub lower: f64,
    pub lower_method: RipMethod,
    pub supports_evaluated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RipInstance {
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: usize,
    /// `||(1/m) A*A - I||_2`.
    pub gram_deviation: f64,
    pub rows: Vec<RipRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RipReport {
    pub m: usize,
    pub options: RipOptions,
    pub instances: Vec<RipInstance>,
    /// Largest `|delta_N - gram_deviation|` over instances with an exact `delta_N`.
    pub full_support_gap: Option<f64>,
    /// Exact constants non-decreasing in `s` for every instance.
    pub monotone: bool,
    /// Every lower bound at most the exact value.
    pub lower_below_exact: bool,
}

/// For each N of the grid and each trial, `delta_s` of `A / sqrt(m)` for
/// `s = 1..=s_max`, exactly when affordable, and a randomized lower bound.
pub fn run_rip_study(cfg: &ExperimentConfig, opts: &RipOptions) -> Result<RipReport> {
    cfg.validate()?;
    if opts.supports == 0 {
        return Err(Error::invalid("need at least one random support"));
    }
    let trials = cfg.trials;
    let m = cfg.m;
    let instances = run_ordered(cfg.workers, cfg.n_grid.len() * trials, |u| {
        let n = cfg.n_grid[u / trials];
        let trial = u % trials;
        let stream = split_stream(cfg.seed, trial as u64).derive_index(n as u64);
        let data = draw_trial(cfg.features, cfg.d, m, n, n, cfg.gamma, cfg.sigma, stream)?;
        let gram_deviation = gram_spectrum_of(&data.a, Side::Columns)?.deviation();
        let a = data.a / nalgebra::Complex::new((m as f64).sqrt(), 0.0);
        let s_max = opts.s_max.unwrap_or(n).min(n);
        let mut rows = Vec::with_capacity(s_max);
        for s in 1..=s_max {
            let exact = if binomial(n, s) <= opts.budget as u128 {
                Some(rip_constant_exact_with_budget(&a, s, opts.budget)?.value)
            } else {
                None
            };
            let lower = rip_constant_lower_mc(&a, s, opts.supports, stream.derive(Purpose::Supports).derive_index(s as u64))?;
            rows.push(RipRow {
                s,
                exact,
                lower: lower.value,
                lower_method: lower.method,
                supports_evaluated: lower.supports_evaluated,
            });
        }
        Ok(RipInstance { n, trial, gram_deviation, rows })
    })?;

    let full_support_gap = instances
        .iter()
        .filter_map(|i| i.rows.iter().find(|r| r.s == i.n).and_then(|r| r.exact).map(|e| (e - i.gram_deviation).abs()))
        .reduce(f64::max);
    let monotone = instances.iter().all(|i| {
        let exact: Vec<f64> = i.rows.iter().filter_map(|r| r.exact).collect();
        exact.windows(2).all(|w| w[0] <= w[1])
    });
    let lower_below_exact =
        instances.iter().flat_map(|i| i.rows.iter()).all(|r| r.exact.is_none_or(|e| r.lower <= e));
    Ok(RipReport { m, options: *opts, instances, full_support_gap, monotone, lower_below_exact })
}
