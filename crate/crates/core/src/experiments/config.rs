use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::sampling::{NoiseModel, Purpose, RngStream};
use crate::solvers::BpdnOptions;
use crate::targets::TargetFunction;
use crate::theory::TheoryConstants;

/// Noise as given on the command line. `Snr(r)` is Gaussian noise with
/// `nu = r * std(noiseless training outputs)`, resolved per trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "level", rename_all = "snake_case")]
pub enum NoiseChoice {
    None,
    BoundedUniform(f64),
    Gaussian(f64),
    Snr(f64),
}

impl NoiseChoice {
    /// Concrete model for a trial whose noiseless outputs have the given
    /// standard deviation.
    pub fn resolve(&self, output_std: f64) -> Result<NoiseModel> {
        match *self {
            NoiseChoice::None => Ok(NoiseModel::None),
            NoiseChoice::BoundedUniform(e) => NoiseModel::bounded_uniform(e),
            NoiseChoice::Gaussian(nu) => NoiseModel::gaussian(nu),
            NoiseChoice::Snr(r) => {
                if r * output_std > 0.0 {
                    NoiseModel::gaussian(r * output_std)
                } else {
                    Ok(NoiseModel::None)
                }
            }
        }
    }
}

impl FromStr for NoiseChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let level = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| Error::invalid(format!("noise '{s}' needs a level")))?;
            let v: f64 = a.parse().map_err(|_| Error::invalid(format!("bad noise level '{a}'")))?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::invalid(format!("noise level must be positive, got {v}")))
            }
        };
        match kind {
            "none" if arg.is_none() => Ok(NoiseChoice::None),
            "bounded" => Ok(NoiseChoice::BoundedUniform(level(arg)?)),
            "gaussian" => Ok(NoiseChoice::Gaussian(level(arg)?)),
            "snr" => Ok(NoiseChoice::Snr(level(arg)?)),
            _ => Err(Error::invalid(format!("unknown noise '{s}'; use none, bounded:E, gaussian:nu or snr:r"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetChoice {
    Linear,
    Planted { s: usize },
    Bump { a: f64 },
}

impl TargetChoice {
    /// Draws the target for one trial. Planted weights follow the feature
    /// weight law `N(0, sigma^2 I)`.
    pub fn build(&self, d: usize, sigma: f64, stream: RngStream) -> Result<TargetFunction<f64>> {
        match *self {
            TargetChoice::Linear => TargetFunction::linear_random(d, stream.derive(Purpose::Target)),
            TargetChoice::Planted { s } => TargetFunction::planted_random(d, s, sigma, stream.derive(Purpose::Target)),
            TargetChoice::Bump { a } => TargetFunction::gaussian_bump(a, sigma, d),
        }
    }
}

impl FromStr for TargetChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unknown target '{s}'; use linear, planted:s or bump:a"));
        match s.split_once(':') {
            None if s == "linear" => Ok(TargetChoice::Linear),
            Some(("planted", v)) => {
                let s: usize = v.parse().map_err(|_| bad())?;
                if s == 0 {
                    return Err(Error::invalid("planted target needs s >= 1"));
                }
                Ok(TargetChoice::Planted { s })
            }
            Some(("bump", v)) => {
                let a: f64 = v.parse().map_err(|_| bad())?;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::invalid(format!("bump width must be positive, got {a}")));
                }
                Ok(TargetChoice::Bump { a })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for TargetChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetChoice::Linear => write!(f, "linear"),
            TargetChoice::Planted { s } => write!(f, "planted:{s}"),
            TargetChoice::Bump { a } => write!(f, "bump:{a}"),
        }
    }
}

/// Parses `a:b:step` (inclusive) or a comma separated list.
pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::invalid(format!("bad grid '{s}'; use a:b:step or a comma separated list"));
    let grid: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let p: Vec<usize> = parts.iter().map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let (a, b, step) = (p[0], p[1], p[2]);
        if step == 0 || a > b {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    check_grid(&grid)?;
    Ok(grid)
}

fn check_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("N grid is empty"));
    }
    if grid[0] == 0 {
        return Err(Error::invalid("N grid entries must be positive"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("N grid must be strictly ascending"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub m: usize,
    pub n_grid: Vec<usize>,
    /// Standard deviation of the data, `x ~ N(0, gamma^2 I)`.
    pub gamma: f64,
    /// Standard deviation of the weights, `w ~ N(0, sigma^2 I)`.
    pub sigma: f64,
    pub features: FeatureKind,
    pub noise: NoiseChoice,
    pub target: TargetChoice,
    pub trials: usize,
    pub seed: u64,
    pub n_test: usize,
    pub eta: f64,
    pub delta: f64,
    pub bpdn: BpdnOptions,
    pub constants: TheoryConstants,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for ExperimentConfig {
    /// The double descent protocol: d = 3, m = 100, weight variance 0.1,
    /// unit data variance, linear target, 10 trials, N = 10..500.
    fn default() -> Self {
        ExperimentConfig {
            d: 3,
            m: 100,
            n_grid: (10..=500).step_by(10).collect(),
            gamma: 1.0,
            sigma: 0.1f64.sqrt(),
            features: FeatureKind::Fourier,
            noise: NoiseChoice::None,
            target: TargetChoice::Linear,
            trials: 10,
            seed: 0,
            n_test: 1000,
            eta: 0.5,
            delta: 0.05,
            bpdn: BpdnOptions::default(),
            constants: TheoryConstants::default(),
            out: PathBuf::from("out"),
            workers: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.m == 0 {
            return Err(Error::invalid("d and m must be positive"));
        }
        check_grid(&self.n_grid)?;
        for (name, v) in [("gamma", self.gamma), ("sigma", self.sigma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.n_test == 0 {
            return Err(Error::invalid("n_test must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be at least 1"));
        }
        self.constants.validate()?;
        if let TargetChoice::Bump { a } = self.target {
            if a * a * self.sigma * self.sigma < 1.0 {
                return Err(Error::invalid(format!(
                    "bump width {a} is below 1/sigma = {}; the rho-norm would be infinite",
                    1.0 / self.sigma
                )));
            }
        }
        Ok(())
    }
}
