//! Double descent sweep over the number of features.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, NoiseChoice};
use super::{add_noise, argmax, draw_trial, output_std, rescale, run_ordered, train, Stats};
use crate::error::{Error, Result};
use crate::sampling::{split_stream, Purpose};
use crate::solvers::residual_norm;
use crate::spectral::{svd_spectrum, Side};
use crate::targets::empirical_risk;
use crate::theory::{risk_bound_ls, risk_bound_minnorm, BoundInputs};

/// One (N, trial) cell. Column order is the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub trial: usize,
    /// `sigma_max / sigma_min` of A; infinite when numerically singular.
    pub cond_number: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub train_residual: f64,
    pub empirical_risk: f64,
    pub bound_value: Option<f64>,
}

/// Trial averages at one N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub ratio: f64,
    pub cond_mean: f64,
    pub cond_median: f64,
    pub cond_infinite: usize,
    pub risk_mean: f64,
    pub risk_se: f64,
    pub risk_median: f64,
    pub cond_rescaled: f64,
    pub risk_rescaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
    /// N maximizing the averaged condition number.
    pub cond_argmax: Option<usize>,
    /// N maximizing the averaged risk.
    pub risk_argmax: Option<usize>,
    pub notes: Vec<String>,
}

impl SweepResult {
    pub fn mean_risk_at(&self, n: usize) -> Option<f64> {
        self.summary.iter().find(|r| r.n == n).map(|r| r.risk_mean)
    }

    /// Distance between the two argmaxima in grid steps.
    pub fn argmax_gap(&self) -> Option<usize> {
        let pos = |n: usize| self.summary.iter().position(|r| r.n == n);
        Some(pos(self.cond_argmax?)?.abs_diff(pos(self.risk_argmax?)?))
    }
}

fn numeric_failure(e: &Error) -> bool {
    matches!(e, Error::NumericalFailure { .. } | Error::Singular { .. })
}

fn sweep_cell(cfg: &ExperimentConfig, n: usize, trial: usize) -> Result<SweepRow> {
    let n_max = *cfg.n_grid.last().expect("validated grid");
    let ts = split_stream(cfg.seed, trial as u64);
    let data = draw_trial(cfg.features, cfg.d, cfg.m, n, n_max, cfg.gamma, cfg.sigma, ts)?;
    let target = cfg.target.build(cfg.d, cfg.sigma, ts)?;
    let f = target.eval(&data.x)?;
    let noise = cfg.noise.resolve(output_std(&f))?;
    let y = add_noise(&f, &noise, ts)?;

    let side = if n < cfg.m { Side::Columns } else { Side::Rows };
    let (cond_number, lambda_min, lambda_max) = match svd_spectrum(&data.a, side) {
        Ok(s) => (s.cond_number, s.lambda_min, s.lambda_max),
        Err(e) if numeric_failure(&e) => (f64::INFINITY, f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };

    let (train_residual, risk) = match train(&data.a, &y) {
        Ok(c) => {
            let r = empirical_risk(&target, &data.w, &c, cfg.features, cfg.n_test, cfg.gamma, ts.derive(Purpose::Test))?;
            (residual_norm(&data.a, &c.values, &y), r.empirical_risk)
        }
        Err(e) if numeric_failure(&e) => (f64::INFINITY, f64::INFINITY),
        Err(e) => return Err(e),
    };

    let bound_value = match target.rho_norm {
        Some(rho) if n != cfg.m => {
            let p = BoundInputs {
                n,
                m: cfg.m,
                d: cfg.d,
                gamma: cfg.gamma,
                sigma: cfg.sigma,
                delta: cfg.delta,
                f_rho_norm: rho,
                noise_bound: noise.effective_bound(),
            };
            let b = if n < cfg.m {
                risk_bound_ls(&p, cfg.eta, &cfg.constants)?
            } else {
                risk_bound_minnorm(&p, cfg.eta, &cfg.constants)?
            };
            Some(b.value)
        }
        _ => None,
    };

    Ok(SweepRow {
        n,
        m: cfg.m,
        d: cfg.d,
        trial,
        cond_number,
        lambda_min,
        lambda_max,
        train_residual,
        empirical_risk: risk,
        bound_value,
    })
}

/// For every N in the grid and every trial: features, training (least
/// squares below the threshold, min-norm at and above it), the condition
/// number and extreme eigenvalues of the matching normalized Gram matrix,
/// and the risk on fresh test points.
///
/// Within a trial the training points, target, noise and test points are
/// shared across N and the weights are nested.
pub fn run_double_descent_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let trials = cfg.trials;
    let rows = run_ordered(cfg.workers, cfg.n_grid.len() * trials, |u| {
        sweep_cell(cfg, cfg.n_grid[u / trials], u % trials)
    })?;

    let mut summary: Vec<SummaryRow> = rows
        .chunks(trials)
        .map(|cell| {
            let n = cell[0].n;
            let conds: Vec<f64> = cell.iter().map(|r| r.cond_number).collect();
            let risks: Vec<f64> = cell.iter().map(|r| r.empirical_risk).collect();
            let c = Stats::of(&conds);
            let r = Stats::of(&risks);
            SummaryRow {
                n,
                ratio: n as f64 / cfg.m as f64,
                cond_mean: c.mean,
                cond_median: c.median,
                cond_infinite: trials - c.count,
                risk_mean: r.mean,
                risk_se: r.se,
                risk_median: r.median,
                cond_rescaled: 0.0,
                risk_rescaled: 0.0,
            }
        })
        .collect();
    let cond_curve: Vec<f64> = summary.iter().map(|s| s.cond_mean).collect();
    let risk_curve: Vec<f64> = summary.iter().map(|s| s.risk_mean).collect();
    for (s, (c, r)) in summary.iter_mut().zip(rescale(&cond_curve).into_iter().zip(rescale(&risk_curve))) {
        s.cond_rescaled = c;
        s.risk_rescaled = r;
    }

    let mut notes = vec![
        "condition number is sigma_max/sigma_min of A; lambda_* are eigenvalues of (1/m)A*A below the threshold and (1/N)AA* at or above it".to_string(),
        "trial averages skip infinite entries; cond_infinite counts them".to_string(),
    ];
    if let NoiseChoice::Snr(r) = cfg.noise {
        notes.push(format!(
            "assumption: snr:{r} means Gaussian noise with nu = {r} times the standard deviation of the noiseless training outputs"
        ));
    }

    Ok(SweepResult {
        cond_argmax: argmax(&cond_curve).map(|i| summary[i].n),
        risk_argmax: argmax(&risk_curve).map(|i| summary[i].n),
        rows,
        summary,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::TargetChoice;

    fn small() -> ExperimentConfig {
        ExperimentConfig { d: 2, m: 12, n_grid: vec![4, 8, 12, 16, 24], trials: 3, n_test: 50, ..Default::default() }
    }

    #[test]
    fn rows_in_grid_then_trial_order() {
        let r = run_double_descent_sweep(&small()).unwrap();
        assert_eq!(r.rows.len(), 15);
        assert_eq!((r.rows[4].n, r.rows[4].trial), (8, 1));
        assert_eq!(r.summary.len(), 5);
        for row in &r.rows {
            assert!(row.cond_number >= 1.0 - 1e-12);
            assert!(row.empirical_risk >= 0.0);
            assert!(row.bound_value.is_none());
        }
        // interpolation at and above the threshold
        assert!(r.rows.iter().filter(|row| row.n >= 12).all(|row| row.train_residual < 1e-6));
    }

    #[test]
    fn bump_target_gets_bounds_off_threshold() {
        let cfg = ExperimentConfig { target: TargetChoice::Bump { a: 4.0 }, ..small() };
        let r = run_double_descent_sweep(&cfg).unwrap();
        for row in &r.rows {
            assert_eq!(row.bound_value.is_some(), row.n != 12);
        }
    }

    #[test]
    fn workers_do_not_change_rows() {
        let one = run_double_descent_sweep(&small()).unwrap();
        let three = run_double_descent_sweep(&ExperimentConfig { workers: 3, ..small() }).unwrap();
        assert_eq!(one, three);
    }

    #[test]
    fn snr_assumption_is_noted() {
        let cfg = ExperimentConfig { noise: NoiseChoice::Snr(0.1), ..small() };
        let r = run_double_descent_sweep(&cfg).unwrap();
        assert!(r.notes.iter().any(|n| n.starts_with("assumption: snr")));
    }
}
