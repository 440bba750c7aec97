//! Empirical risk against the closed-form risk bounds for the least
//! squares, min-norm and basis pursuit pipelines.

use serde::{Deserialize, Serialize};

use super::config::NoiseChoice;
use super::{add_noise, draw_trial, output_std, run_ordered};
use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::sampling::{split_stream, Purpose};
use crate::solvers::{best_s_term_error, bpdn, least_squares, min_norm_interpolate, BpdnOptions};
use crate::targets::{best_phi_coeffs, empirical_risk, RiskReport, TargetFunction};
use crate::theory::{
    check_regime_conditions, risk_bound_bp, risk_bound_ls, risk_bound_minnorm, xi_bp, BoundInputs,
    BoundReport, Condition, RegimeReport, TheoryConstants,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    LeastSquares,
    MinNorm,
    BasisPursuit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub d: usize,
    pub gamma: f64,
    pub sigma: f64,
    /// Bump width; `None` means `a^2 = 2 / sigma^2`.
    pub a: Option<f64>,
    pub eta: f64,
    pub delta: f64,
    pub noise: NoiseChoice,
    pub features: FeatureKind,
    /// `(m, N)` with `m > N`.
    pub ls: (usize, usize),
    /// `(m, N)` with `m < N`.
    pub min_norm: (usize, usize),
    /// `(m, N, s)`.
    pub bp: (usize, usize, usize),
    pub trials: usize,
    pub seed: u64,
    pub n_test: usize,
    pub bpdn: BpdnOptions,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for ValidationConfig {
    /// A point where every complexity, uncertainty and probability condition
    /// holds once the universal constant is replaced by one.
    fn default() -> Self {
        ValidationConfig {
            d: 10,
            gamma: 1.2,
            sigma: 1.0,
            a: None,
            eta: 0.5,
            delta: 0.05,
            noise: NoiseChoice::None,
            features: FeatureKind::Fourier,
            ls: (5000, 10),
            min_norm: (10, 5000),
            bp: (130, 200, 2),
            trials: 100,
            seed: 0,
            n_test: 1000,
            bpdn: BpdnOptions::default(),
            workers: 1,
        }
    }
}

impl ValidationConfig {
    pub fn width(&self) -> f64 {
        self.a.unwrap_or(2f64.sqrt() / self.sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.trials == 0 || self.n_test == 0 || self.workers == 0 {
            return Err(Error::invalid("d, trials, n_test and workers must be positive"));
        }
        if self.ls.0 <= self.ls.1 || self.ls.1 == 0 {
            return Err(Error::invalid(format!("least squares needs m > N >= 1, got {:?}", self.ls)));
        }
        if self.min_norm.0 >= self.min_norm.1 || self.min_norm.0 == 0 {
            return Err(Error::invalid(format!("min-norm needs N > m >= 1, got {:?}", self.min_norm)));
        }
        let (m, n, s) = self.bp;
        if m == 0 || s == 0 || s > n {
            return Err(Error::invalid(format!("basis pursuit needs m >= 1 and 1 <= s <= N, got {:?}", self.bp)));
        }
        TargetFunction::gaussian_bump(self.width(), self.sigma, self.d)?;
        Ok(())
    }

    fn dims(&self, p: Pipeline) -> (usize, usize) {
        match p {
            Pipeline::LeastSquares => self.ls,
            Pipeline::MinNorm => self.min_norm,
            Pipeline::BasisPursuit => (self.bp.0, self.bp.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub risk: RiskReport,
    pub covered: bool,
    /// Best 1-term error of the best-phi coefficients (basis pursuit only).
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub mode: &'static str,
    pub regime: RegimeReport,
    pub bound_conditions: Vec<Condition>,
    pub conditions_satisfied: bool,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub pipeline: Pipeline,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub s: Option<usize>,
    pub strict: ModeSummary,
    pub permissive: ModeSummary,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rho_norm: f64,
    pub pipelines: Vec<PipelineReport>,
}

impl ValidationReport {
    pub fn get(&self, p: Pipeline) -> Option<&PipelineReport> {
        self.pipelines.iter().find(|r| r.pipeline == p)
    }
}

fn bound_for(
    cfg: &ValidationConfig,
    p: Pipeline,
    inputs: &BoundInputs,
    theta: f64,
    constants: &TheoryConstants,
) -> Result<BoundReport> {
    match p {
        Pipeline::LeastSquares => risk_bound_ls(inputs, cfg.eta, constants),
        Pipeline::MinNorm => risk_bound_minnorm(inputs, cfg.eta, constants),
        Pipeline::BasisPursuit => risk_bound_bp(inputs, cfg.bp.2, theta, constants),
    }
}

fn run_trial(
    cfg: &ValidationConfig,
    p: Pipeline,
    target: &TargetFunction<f64>,
    trial: usize,
) -> Result<(TrialRecord, BoundReport)> {
    let (m, n) = cfg.dims(p);
    let rho = target.rho_norm.expect("bump has a finite rho-norm");
    let stream = split_stream(cfg.seed, trial as u64).derive_index(p as u64 + 1);
    let data = draw_trial(cfg.features, cfg.d, m, n, n, cfg.gamma, cfg.sigma, stream)?;
    let f = target.eval(&data.x)?;
    let noise = cfg.noise.resolve(output_std(&f))?;
    let y = add_noise(&f, &noise, stream)?;
    let inputs = BoundInputs {
        n,
        m,
        d: cfg.d,
        gamma: cfg.gamma,
        sigma: cfg.sigma,
        delta: cfg.delta,
        f_rho_norm: rho,
        noise_bound: noise.effective_bound(),
    };

    let (c, theta) = match p {
        Pipeline::LeastSquares => (least_squares(&data.a, &y)?, None),
        Pipeline::MinNorm => (min_norm_interpolate(&data.a, &y)?, None),
        Pipeline::BasisPursuit => {
            let xi = xi_bp(inputs.epsilon()?, rho, inputs.noise_bound);
            let c = bpdn(&data.a, &y, xi, &cfg.bpdn)?;
            let star = best_phi_coeffs(target, &data.w)?;
            (c, Some(best_s_term_error(&star.values, cfg.bp.2, 1)?))
        }
    };
    let bound = bound_for(cfg, p, &inputs, theta.unwrap_or(0.0), &TheoryConstants::default())?;
    let mut risk = empirical_risk(target, &data.w, &c, cfg.features, cfg.n_test, cfg.gamma, stream.derive(Purpose::Test))?;
    risk.bound_value = Some(bound.value);
    risk.noise = noise;
    risk.seeds = vec![stream];
    let covered = risk.empirical_risk <= bound.value;
    Ok((TrialRecord { trial, risk, covered, theta }, bound))
}

fn mode_summary(
    cfg: &ValidationConfig,
    p: Pipeline,
    constants: &TheoryConstants,
    trials: &[TrialRecord],
) -> Result<ModeSummary> {
    let (m, n) = cfg.dims(p);
    let regime = check_regime_conditions(m, n, cfg.d, cfg.gamma, cfg.sigma, cfg.eta, constants)?;
    let inputs = BoundInputs {
        n,
        m,
        d: cfg.d,
        gamma: cfg.gamma,
        sigma: cfg.sigma,
        delta: cfg.delta,
        f_rho_norm: TargetFunction::gaussian_bump(cfg.width(), cfg.sigma, cfg.d)?.rho_norm.unwrap_or(0.0),
        noise_bound: 0.0,
    };
    let bound_conditions = bound_for(cfg, p, &inputs, 0.0, constants)?.conditions;
    let conditions_satisfied = bound_conditions.iter().all(|c| c.ok);
    let coverage = trials.iter().filter(|t| t.covered).count() as f64 / trials.len() as f64;
    Ok(ModeSummary { mode: constants.mode(), regime, bound_conditions, conditions_satisfied, coverage })
}

/// Runs the three pipelines on the Gaussian bump target. Bound values do
/// not depend on the universal constant; the strict and permissive
/// summaries differ only in which conditions hold.
pub fn run_bound_validation(cfg: &ValidationConfig) -> Result<ValidationReport> {
    cfg.validate()?;
    let target = TargetFunction::gaussian_bump(cfg.width(), cfg.sigma, cfg.d)?;
    let rho = target.rho_norm.expect("bump has a finite rho-norm");
    let mut pipelines = Vec::new();
    for p in [Pipeline::LeastSquares, Pipeline::MinNorm, Pipeline::BasisPursuit] {
        let results = run_ordered(cfg.workers, cfg.trials, |t| run_trial(cfg, p, &target, t))?;
        let mut trials: Vec<TrialRecord> = results.into_iter().map(|(r, _)| r).collect();
        let strict = mode_summary(cfg, p, &TheoryConstants::default(), &trials)?;
        let permissive = mode_summary(cfg, p, &TheoryConstants::permissive(), &trials)?;
        for t in trials.iter_mut() {
            t.risk.regime = Some(strict.regime.regime);
        }
        let (m, n) = cfg.dims(p);
        let s = matches!(p, Pipeline::BasisPursuit).then_some(cfg.bp.2);
        pipelines.push(PipelineReport { pipeline: p, m, n, s, strict, permissive, trials });
    }
    Ok(ValidationReport { rho_norm: rho, pipelines })
}
