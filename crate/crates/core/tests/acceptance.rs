//! Acceptance checks, one line per criterion. Exits non-zero when any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use rfcond::experiments::rip::RipOptions;
use rfcond::experiments::validation::Pipeline;
use rfcond::experiments::{
    draw_trial, run_bound_validation, run_double_descent_sweep, run_rip_study, run_spectrum_density,
    run_threshold_study, ExperimentConfig, Scaling, Stats, ValidationConfig,
};
use rfcond::sampling::Purpose;
use rfcond::solvers::l1;
use rfcond::spectral::{gram_spectrum_of, Side};
use rfcond::theory::{beta_overlap, eig_band, k_eta, kappa_threshold, rip_bound_f};
use rfcond::{
    best_s_term_error, bpdn, gaussian_matrix, least_squares, min_norm_interpolate, pseudoinverse, ridge,
    split_stream, BpdnOptions, Complex, FeatureKind, Result,
};

type C = Complex<f64>;

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn fourier(m: usize, n: usize, d: usize, gamma: f64, sigma: f64, seed: u64, trial: u64) -> Result<DMatrix<C>> {
    Ok(draw_trial(FeatureKind::Fourier, d, m, n, n, gamma, sigma, split_stream(seed, trial))?.a)
}

fn complex_vec(n: usize, seed: u64, trial: u64) -> Result<DVector<C>> {
    let g = gaussian_matrix::<f64>(2, n, 1.0, split_stream(seed, trial).derive(Purpose::Target))?;
    Ok(DVector::from_fn(n, |i, _| C::new(g[(0, i)], g[(1, i)])))
}

fn closed_forms() -> Result<Outcome> {
    let f = rip_bound_f(0.4, 0.02, 0.1)?;
    let cap = 4.0 / 41f64.sqrt();
    let f_ok = f <= cap && (f - 0.6118).abs() <= 1e-3;

    let (lo, hi): (f64, f64) = eig_band(0.2)?;
    let k_err = (k_eta(0.2)? - hi / lo).abs();

    let mut rt_err: f64 = 0.0;
    for (eta2, s, d) in [(0.025, 10, 5), (0.5, 1, 1), (0.1, 3, 10), (0.9, 40, 2), (1e-3, 7, 25)] {
        let kappa = kappa_threshold(eta2, s, d)?;
        rt_err = rt_err.max((s as f64 * beta_overlap(kappa, 1.0, d) - eta2).abs());
    }
    outcome(
        f_ok && k_err <= 1e-12 && rt_err <= 1e-10,
        format!("f = {f:.4} (cap {cap:.4}), K_eta error {k_err:.1e}, round-trip error {rt_err:.1e}"),
    )
}

fn threshold_bounds() -> Result<Outcome> {
    let mut pass = true;
    let mut min_margin = f64::INFINITY;
    let mut max_margin = f64::INFINITY;
    for d in [2, 5] {
        let cfg = ExperimentConfig {
            d,
            n_grid: vec![5, 10, 20],
            gamma: 1.0,
            sigma: 1.0,
            trials: 200,
            ..Default::default()
        };
        for cell in run_threshold_study(&cfg)?.cells {
            let (lmin, lmax) = (&cell.lambda_min, &cell.lambda_max);
            let up = cell.lambda_min_upper + 3.0 * lmin.se - lmin.mean;
            let down = lmax.mean - (cell.lambda_max_lower - 3.0 * lmax.se);
            pass &= up >= 0.0 && down >= 0.0;
            min_margin = min_margin.min(up);
            max_margin = max_margin.min(down);
        }
    }
    outcome(
        pass,
        format!("6 cells x 200 trials, smallest slack lambda_min {min_margin:.3}, lambda_max {max_margin:.3}"),
    )
}

fn concentration() -> Result<Outcome> {
    let (n, d, trials) = (10, 5, 50u64);
    let kappa = kappa_threshold(0.5 / 20.0, n, d)?;
    let mut medians = Vec::new();
    for m in [100usize, 1_000, 10_000] {
        let mut dev = Vec::with_capacity(trials as usize);
        for t in 0..trials {
            let stream = split_stream(3, t).derive_index(m as u64);
            let a = draw_trial(FeatureKind::Fourier, d, m, n, n, kappa, 1.0, stream)?.a;
            dev.push(gram_spectrum_of(&a, Side::Columns)?.deviation());
        }
        medians.push(Stats::of(&dev).median);
    }
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let last = medians[2];
    outcome(
        decreasing && last <= 0.875,
        format!(
            "gamma sigma = {kappa:.4}, medians {:.4} / {:.4} / {:.4} at m = 1e2 / 1e3 / 1e4",
            medians[0], medians[1], medians[2]
        ),
    )
}

fn double_descent() -> Result<Outcome> {
    let cfg = ExperimentConfig::default();
    let r = run_double_descent_sweep(&cfg)?;
    let cond_at = r.cond_argmax;
    let cond_ok = cond_at.is_some_and(|n| (80..=120).contains(&n));
    let r100 = r.mean_risk_at(100).unwrap_or(f64::NAN);
    let r500 = r.mean_risk_at(500).unwrap_or(f64::NAN);
    let risk_ok = r500 * 10.0 <= r100;
    let gap = r.argmax_gap();
    let gap_ok = gap.is_some_and(|g| g <= 1);
    outcome(
        cond_ok && risk_ok && gap_ok,
        format!(
            "cond argmax N = {cond_at:?} [{}], risk(500) = {r500:.3e} vs risk(100) = {r100:.3e} [{}], \
             risk argmax N = {:?}, gap {gap:?} steps [{}]",
            verdict(cond_ok),
            verdict(risk_ok),
            r.risk_argmax,
            verdict(gap_ok)
        ),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "fails"
    }
}

fn spectrum() -> Result<Outcome> {
    let cfg = ExperimentConfig { d: 50, m: 150, gamma: 1.0, sigma: 1.0, trials: 10, ..Default::default() };
    let r = run_spectrum_density(&cfg, &[Scaling::Threshold, Scaling::OverLog3])?;
    let over = r.get(Scaling::OverLog3).expect("requested");
    let at = r.get(Scaling::Threshold).expect("requested");
    outcome(
        over.sv_min >= 0.5 && at.sv_ratio <= 0.1,
        format!(
            "N = {}: sv_min {:.4}; N = {}: sv_min / sv_max {:.2e}",
            over.n, over.sv_min, at.n, at.sv_ratio
        ),
    )
}

fn rip_oracle() -> Result<Outcome> {
    let cfg = ExperimentConfig {
        d: 5,
        m: 30,
        n_grid: vec![4, 6, 8, 10],
        gamma: 1.0,
        sigma: 1.0,
        trials: 5,
        ..Default::default()
    };
    let r = run_rip_study(&cfg, &RipOptions::default())?;
    let all_exact = r.instances.iter().all(|i| i.rows.iter().all(|row| row.exact.is_some()));
    let gap = r.full_support_gap.unwrap_or(f64::INFINITY);
    outcome(
        r.instances.len() == 20 && all_exact && gap <= 1e-10 && r.monotone && r.lower_below_exact,
        format!(
            "{} instances, full-support gap {gap:.1e}, monotone {}, lower <= exact {}",
            r.instances.len(),
            r.monotone,
            r.lower_below_exact
        ),
    )
}

fn rel(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn solver_oracles() -> Result<Outcome> {
    // pseudoinverse identities
    let mut pinv_err: f64 = 0.0;
    for (t, (m, n)) in [(8, 3), (3, 8), (10, 10), (12, 1), (1, 12), (25, 7)].into_iter().enumerate() {
        let a = fourier(m, n, 4, 1.0, 1.0, 70, t as u64)?;
        let p = pseudoinverse(&a)?;
        let ap = &a * &p;
        let pa = &p * &a;
        pinv_err = pinv_err
            .max(rel(&(&ap * &a), &a))
            .max(rel(&(&pa * &p), &p))
            .max(rel(&ap.adjoint(), &ap))
            .max(rel(&pa.adjoint(), &pa));
    }

    // ridge limit
    let mut ridge_err: f64 = 0.0;
    for (t, (m, n)) in [(40, 8), (8, 40), (60, 15), (15, 60)].into_iter().enumerate() {
        let a = fourier(m, n, 8, 1.0, 1.0, 71, t as u64)?;
        let y = complex_vec(m, 71, t as u64)?;
        let reference = if n < m { least_squares(&a, &y)? } else { min_norm_interpolate(&a, &y)? };
        let r = ridge(&a, &y, 1e-10)?;
        ridge_err = ridge_err.max((&r.values - &reference.values).norm() / reference.values.norm());
    }

    // basis pursuit against feasible points
    let opts = BpdnOptions::default();
    let (mut worst_gap, mut worst_excess) = (0.0f64, f64::NEG_INFINITY);
    let mut feasible_checked = 0;
    for t in 0..5u64 {
        let (m, n, xi) = (20, 60, 0.05);
        let a = fourier(m, n, 6, 1.0, 1.0, 72, t)?.map(|z| z / (m as f64).sqrt());
        let mut v = DVector::from_element(n, C::new(0.0, 0.0));
        let coef = complex_vec(4, 72, t)?;
        for (j, k) in [3usize, 17, 29, 44].into_iter().enumerate() {
            v[(k + 7 * t as usize) % n] = coef[j];
        }
        let e = complex_vec(m, 73, t)?;
        let e = e.scale(0.5 * xi * (m as f64).sqrt() / e.norm());
        let y = &a * &v + e;
        let c = bpdn(&a, &y, xi, &opts)?;
        worst_gap = worst_gap.max(c.diagnostics.duality_gap.unwrap_or(f64::INFINITY));
        let mut candidates = vec![v, min_norm_interpolate(&a, &y)?.values];
        candidates.push(candidates[0].map(|z| z * 1.01));
        for cand in candidates {
            if (&a * &cand - &y).norm() <= xi * (m as f64).sqrt() {
                feasible_checked += 1;
                worst_excess = worst_excess.max(c.l1_norm() - l1(&cand));
            }
        }
    }

    // best s-term error against exhaustive support search
    let mut theta_err: f64 = 0.0;
    for n in 1..=10usize {
        let c = complex_vec(n, 74, n as u64)?;
        for s in 1..=n {
            for p in [1u32, 2] {
                let brute = (0..n)
                    .combinations(s)
                    .map(|keep| {
                        let rest = (0..n).filter(|k| !keep.contains(k)).map(|k| c[k].norm());
                        if p == 1 {
                            rest.sum::<f64>()
                        } else {
                            rest.map(|x| x * x).sum::<f64>().sqrt()
                        }
                    })
                    .fold(f64::INFINITY, f64::min);
                theta_err = theta_err.max((best_s_term_error(&c, s, p)? - brute).abs());
            }
        }
    }

    let pass = pinv_err <= 1e-8
        && ridge_err <= 1e-6
        && worst_gap <= 1e-6
        && worst_excess <= 1e-6
        && feasible_checked > 0
        && theta_err <= 1e-12;
    outcome(
        pass,
        format!(
            "pinv {pinv_err:.1e}, ridge {ridge_err:.1e}, bpdn gap {worst_gap:.1e}, \
             l1 excess {worst_excess:.1e} over {feasible_checked} feasible points, theta {theta_err:.1e}"
        ),
    )
}

fn coverage() -> Result<Outcome> {
    let cfg = ValidationConfig::default();
    let r = run_bound_validation(&cfg)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [Pipeline::LeastSquares, Pipeline::MinNorm, Pipeline::BasisPursuit] {
        let rep = r.get(p).expect("all pipelines run");
        let ok = rep.permissive.conditions_satisfied
            && rep.permissive.coverage >= 0.95
            && !rep.strict.conditions_satisfied;
        pass &= ok;
        parts.push(format!(
            "{p:?}: coverage {:.2}, permissive conditions {}, strict conditions {}",
            rep.permissive.coverage, rep.permissive.conditions_satisfied, rep.strict.conditions_satisfied
        ));
    }
    outcome(pass, format!("{} trials; {}", cfg.trials, parts.join("; ")))
}

fn symmetry() -> Result<Outcome> {
    let (gamma, sigma, d, trials) = (1.0, 0.7, 4, 200u64);
    let summary = |m: usize, n: usize, g: f64, s: f64, side: Side, label: u64| -> Result<[Stats; 3]> {
        let (mut lo, mut hi, mut dev) = (Vec::new(), Vec::new(), Vec::new());
        for t in 0..trials {
            let stream = split_stream(9, t).derive_index(label);
            let a = draw_trial(FeatureKind::Fourier, d, m, n, n, g, s, stream)?.a;
            let gram = gram_spectrum_of(&a, side)?;
            lo.push(gram.lambda_min);
            hi.push(gram.lambda_max);
            dev.push(gram.deviation());
        }
        Ok([Stats::of(&lo), Stats::of(&hi), Stats::of(&dev)])
    };
    let cols = summary(200, 20, gamma, sigma, Side::Columns, 1)?;
    let rows = summary(20, 200, sigma, gamma, Side::Rows, 2)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, (a, b)) in ["lambda_min", "lambda_max", "deviation"].iter().zip(cols.iter().zip(rows.iter())) {
        let z = (a.mean - b.mean).abs() / (a.se * a.se + b.se * b.se).sqrt();
        pass &= z <= 3.0;
        parts.push(format!("{name} {:.4} vs {:.4} ({z:.2} SE)", a.mean, b.mean));
    }
    outcome(pass, parts.join(", "))
}

fn read_tree(dir: &Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        files.push((entry.file_name().to_string_lossy().into_owned(), std::fs::read(entry.path())?));
    }
    files.sort();
    Ok(files)
}

fn determinism() -> Result<Outcome> {
    let runs: [&[&str]; 6] = [
        &["sweep", "--m", "20", "--n-grid", "5:40:5", "--trials", "3", "--n-test", "200", "--noise", "snr:0.1"],
        &["spectrum", "--d", "5", "--m", "20", "--trials", "2"],
        &["threshold", "--trials", "20"],
        &["validate", "--trials", "4", "--ls", "200,5", "--min-norm", "5,200", "--bp", "30,60,2", "--n-test", "200"],
        &["theory", "--m", "500"],
        &["rip", "--n-grid", "4,6", "--trials", "3"],
    ];
    let root = std::env::temp_dir().join(format!("rfcond-acceptance-{}", std::process::id()));
    let mut mismatched = Vec::new();
    let mut files = 0;
    for args in runs {
        let mut trees = Vec::new();
        for (k, workers) in ["1", "8", "1"].into_iter().enumerate() {
            let out = root.join(format!("{}-{k}", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_rfcond"))
                .args(args)
                .args(["--seed", "17", "--workers", workers, "--out"])
                .arg(&out)
                .output()?;
            if !status.status.success() {
                mismatched.push(format!("{} exited with {}", args[0], status.status));
                continue;
            }
            trees.push(read_tree(&out)?);
        }
        if trees.len() == 3 && trees.windows(2).all(|w| w[0] == w[1]) && !trees[0].is_empty() {
            files += trees[0].len();
        } else {
            mismatched.push(args[0].to_string());
        }
    }
    let _ = std::fs::remove_dir_all(&root);
    outcome(
        mismatched.is_empty(),
        format!("6 subcommands, {files} files identical across workers 1 / 8 / 1; mismatches {mismatched:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form consistency", Duration::from_secs(1), closed_forms),
        ("interpolation threshold bounds", Duration::from_secs(30), threshold_bounds),
        ("concentration trend", Duration::from_secs(120), concentration),
        ("double descent reproduction", Duration::from_secs(300), double_descent),
        ("singular value densities", Duration::from_secs(180), spectrum),
        ("rip oracle equivalence", Duration::from_secs(60), rip_oracle),
        ("solver oracles", Duration::from_secs(120), solver_oracles),
        ("risk bound coverage", Duration::from_secs(600), coverage),
        ("distributional symmetry", Duration::from_secs(60), symmetry),
        ("determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed < limit;
        let (pass, detail) = match result {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.2} s, limit {} s{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
