use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rfcond::experiments::output::{
    write_rip, write_spectrum, write_sweep, write_threshold, write_theory, write_validation,
};
use rfcond::experiments::rip::RipOptions;
use rfcond::experiments::{
    parse_grid, run_bound_validation, run_double_descent_sweep, run_rip_study, run_spectrum_density,
    run_threshold_study, ExperimentConfig, NoiseChoice, Scaling, TargetChoice, ValidationConfig,
};
use rfcond::theory::{theory_report, TheoryPoint};
use rfcond::{Error, FeatureKind, Result, TheoryConstants};

#[derive(Parser)]
#[command(name = "rfcond", version, about = "Conditioning and double descent of random Fourier feature matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Condition number and risk across a grid of feature counts.
    Sweep(Common),
    /// Singular value densities under the logarithmic scalings.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Comma separated scaling labels, e.g. "N=m,N=m*log^3(m)".
        #[arg(long)]
        scalings: Option<String>,
    },
    /// Gram spectrum at the interpolation threshold m = N.
    Threshold(Common),
    /// Empirical risk against the closed-form risk bounds.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Least squares shape "m,N".
        #[arg(long)]
        ls: Option<String>,
        /// Min-norm shape "m,N".
        #[arg(long)]
        min_norm: Option<String>,
        /// Basis pursuit shape "m,N,s".
        #[arg(long)]
        bp: Option<String>,
    },
    /// Closed-form quantities at one parameter point.
    Theory {
        #[command(flatten)]
        common: Common,
        /// Print the report to standard output as well.
        #[arg(long)]
        report: bool,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Rho-norm of the target.
        #[arg(long, default_value_t = 1.0)]
        rho_norm: f64,
    },
    /// Restricted isometry constants of small instances.
    Rip {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        s_max: Option<usize>,
        /// Random supports per lower bound.
        #[arg(long, default_value_t = 50)]
        supports: u64,
        /// Largest number of supports enumerated exactly.
        #[arg(long, default_value_t = rfcond::spectral::DEFAULT_SUPPORT_BUDGET)]
        budget: u64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Feature counts as a:b:step or a comma separated list.
    #[arg(long)]
    n_grid: Option<String>,
    /// Standard deviation of the data.
    #[arg(long)]
    gamma: Option<f64>,
    /// Standard deviation of the weights.
    #[arg(long)]
    sigma: Option<f64>,
    /// fourier or relu.
    #[arg(long)]
    features: Option<String>,
    /// none, bounded:E, gaussian:nu or snr:r.
    #[arg(long)]
    noise: Option<String>,
    /// linear, planted:s or bump:a.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Basis pursuit duality gap tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Replace the universal constant of the complexity conditions by 1.
    #[arg(long)]
    permissive_constants: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl Common {
    fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(v) = self.d {
            cfg.d = v;
        }
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = &self.n_grid {
            cfg.n_grid = parse_grid(v)?;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = &self.features {
            cfg.features = v.parse::<FeatureKind>()?;
        }
        if let Some(v) = &self.noise {
            cfg.noise = v.parse::<NoiseChoice>()?;
        }
        if let Some(v) = &self.target {
            cfg.target = v.parse::<TargetChoice>()?;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.tol {
            cfg.bpdn.tolerance = v;
        }
        if let Some(v) = self.max_iter {
            cfg.bpdn.max_iterations = v;
        }
        if let Some(v) = self.n_test {
            cfg.n_test = v;
        }
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if self.permissive_constants {
            cfg.constants = TheoryConstants::permissive();
        }
        cfg.out = self.out.clone();
        cfg.workers = self.workers;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn unit_variance(cfg: ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig { gamma: 1.0, sigma: 1.0, ..cfg }
}

fn parse_tuple<const K: usize>(flag: &str, s: &str) -> Result<[usize; K]> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| Error::InvalidArgument(format!("--{flag}: bad integer '{p}'"))))
        .collect::<Result<_>>()?;
    parts
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("--{flag} expects {K} comma separated integers")))
}

fn report_paths(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(common) => {
            let cfg = common.apply(ExperimentConfig::default())?;
            let r = run_double_descent_sweep(&cfg)?;
            report_paths(&write_sweep(&cfg.out, &cfg, &r)?);
        }
        Command::Spectrum { common, scalings } => {
            let base = unit_variance(ExperimentConfig { d: 50, m: 150, ..Default::default() });
            let cfg = common.apply(base)?;
            let scalings: Vec<Scaling> = match scalings {
                Some(s) => s.split(',').map(|l| l.trim().parse()).collect::<Result<_>>()?,
                None => Scaling::ALL.to_vec(),
            };
            let r = run_spectrum_density(&cfg, &scalings)?;
            report_paths(&write_spectrum(&cfg.out, &cfg, &r)?);
        }
        Command::Threshold(common) => {
            let base = unit_variance(ExperimentConfig { d: 2, n_grid: vec![5, 10, 20], trials: 200, ..Default::default() });
            let cfg = common.apply(base)?;
            let r = run_threshold_study(&cfg)?;
            report_paths(&write_threshold(&cfg.out, &cfg, &r)?);
        }
        Command::Validate { common, ls, min_norm, bp } => {
            let mut v = ValidationConfig::default();
            let c = &common;
            if let Some(x) = c.d {
                v.d = x;
            }
            if let Some(x) = c.gamma {
                v.gamma = x;
            }
            if let Some(x) = c.sigma {
                v.sigma = x;
            }
            if let Some(x) = &c.features {
                v.features = x.parse()?;
            }
            if let Some(x) = &c.noise {
                v.noise = x.parse()?;
            }
            match c.target.as_deref().map(str::parse::<TargetChoice>).transpose()? {
                None => {}
                Some(TargetChoice::Bump { a }) => v.a = Some(a),
                Some(other) => {
                    return Err(Error::UnsupportedTarget(format!(
                        "{other} has no finite rho-norm; validation needs bump:a"
                    )))
                }
            }
            if let Some(x) = c.trials {
                v.trials = x;
            }
            if let Some(x) = c.seed {
                v.seed = x;
            }
            if let Some(x) = c.tol {
                v.bpdn.tolerance = x;
            }
            if let Some(x) = c.max_iter {
                v.bpdn.max_iterations = x;
            }
            if let Some(x) = c.n_test {
                v.n_test = x;
            }
            if let Some(x) = c.eta {
                v.eta = x;
            }
            if let Some(x) = c.delta {
                v.delta = x;
            }
            if let Some(s) = ls {
                let [m, n] = parse_tuple("ls", &s)?;
                v.ls = (m, n);
            }
            if let Some(s) = min_norm {
                let [m, n] = parse_tuple("min-norm", &s)?;
                v.min_norm = (m, n);
            }
            if let Some(s) = bp {
                let [m, n, k] = parse_tuple("bp", &s)?;
                v.bp = (m, n, k);
            }
            v.workers = c.workers;
            v.validate()?;
            let r = run_bound_validation(&v)?;
            report_paths(&write_validation(&c.out, &v, &r)?);
        }
        Command::Theory { common, report, s, rho_norm } => {
            let base = unit_variance(ExperimentConfig { d: 10, n_grid: vec![1000], ..Default::default() });
            let cfg = common.apply(base)?;
            let noise_bound = cfg.noise.resolve(0.0)?.effective_bound();
            let point = TheoryPoint {
                m: cfg.m,
                n: cfg.n_grid[0],
                d: cfg.d,
                gamma: cfg.gamma,
                sigma: cfg.sigma,
                eta: cfg.eta,
                delta: cfg.delta,
                s,
                f_rho_norm: rho_norm,
                noise_bound,
            };
            let r = theory_report(&point, &cfg.constants)?;
            if report {
                let text = serde_json::to_string_pretty(&r)?;
                // a closed pipe on stdout is not an error for a report dump
                let _ = writeln!(std::io::stdout().lock(), "{text}");
            }
            report_paths(&write_theory(&cfg.out, &point, &r)?);
        }
        Command::Rip { common, s_max, supports, budget } => {
            let base = unit_variance(ExperimentConfig { d: 5, m: 30, n_grid: vec![10], trials: 20, ..Default::default() });
            let cfg = common.apply(base)?;
            let opts = RipOptions { s_max, supports, budget };
            let r = run_rip_study(&cfg, &opts)?;
            report_paths(&write_rip(&cfg.out, &cfg, &r)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
