use nalgebra::DVector;

use rfcond::experiments::{draw_trial, train, Stats};
use rfcond::sampling::Purpose;
use rfcond::targets::TargetParams;
use rfcond::theory::{ball_radius, min_features_for_accuracy};
use rfcond::{
    best_phi_coeffs, empirical_risk, gaussian_matrix, min_norm_interpolate, split_stream, FeatureKind,
    TargetFunction,
};

#[test]
fn samples_stay_in_ball_with_stated_probability() {
    let (gamma, d, m, delta) = (1.3, 4, 50, 0.1);
    let r = ball_radius(gamma, d, m, delta).unwrap();
    let trials = 10_000u64;
    let inside = (0..trials)
        .filter(|&t| {
            let x = gaussian_matrix::<f64>(d, m, gamma * gamma, split_stream(11, t)).unwrap();
            x.column_iter().all(|c| c.norm() <= r)
        })
        .count() as f64
        / trials as f64;
    let se = (delta * (1.0 - delta) / trials as f64).sqrt();
    assert!(inside >= 1.0 - delta - 3.0 * se, "fraction {inside}");
}

#[test]
fn best_phi_model_reaches_requested_accuracy() {
    // ||f - f*||_{L2} <= eps ||f||_rho in at least 1 - delta of the trials
    let (eps, delta) = (0.25, 0.05);
    let n = min_features_for_accuracy(eps, delta).unwrap() as usize;
    let (d, sigma, gamma, a) = (2, 1.0, 1.0, 1.5);
    let target = TargetFunction::gaussian_bump(a, sigma, d).unwrap();
    let rho = target.rho_norm.unwrap();
    let trials = 200u64;
    let ok = (0..trials)
        .filter(|&t| {
            let s = split_stream(12, t);
            let w = gaussian_matrix::<f64>(d, n, sigma * sigma, s.derive(Purpose::Weights)).unwrap();
            let c = best_phi_coeffs(&target, &w).unwrap();
            let r = empirical_risk(&target, &w, &c, FeatureKind::Fourier, 10_000, gamma, s.derive(Purpose::Test))
                .unwrap();
            r.empirical_risk.sqrt() <= eps * rho
        })
        .count() as f64
        / trials as f64;
    assert!(ok >= 1.0 - delta, "fraction {ok}");
}

#[test]
fn best_phi_envelope_over_many_draws() {
    let target = TargetFunction::gaussian_bump(1.1f64, 1.0, 3).unwrap();
    let n = 1000;
    let cap = target.rho_norm.unwrap() / n as f64;
    let mut violations = 0;
    for t in 0..100 {
        let w = gaussian_matrix::<f64>(3, n, 1.0, split_stream(13, t)).unwrap();
        let c = best_phi_coeffs(&target, &w).unwrap();
        violations += c.values.iter().filter(|z| z.norm() > cap).count();
    }
    assert_eq!(violations, 0);
}

fn planted_risks(m: usize, n: usize, trials: u64) -> (Vec<f64>, f64) {
    let d = 3;
    let mut risks = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for t in 0..trials {
        let s = split_stream(14, t);
        let target = TargetFunction::<f64>::planted_random(d, 5, 1.0, s.derive(Purpose::Target)).unwrap();
        let data = draw_trial(FeatureKind::Fourier, d, m, n, n, 1.0, 1.0, s).unwrap();
        let y = target.eval(&data.x).unwrap();
        let c = train(&data.a, &y).unwrap();
        if n > m {
            let direct = min_norm_interpolate(&data.a, &y).unwrap();
            worst_residual = worst_residual.max((&data.a * &direct.values - &y).norm());
        }
        let r = empirical_risk(&target, &data.w, &c, FeatureKind::Fourier, 1000, 1.0, s.derive(Purpose::Test)).unwrap();
        risks.push(r.empirical_risk);
    }
    (risks, worst_residual)
}

#[test]
fn planted_min_norm_risk_falls_away_from_threshold() {
    let m = 40;
    let (at, _) = planted_risks(m, m, 10);
    let (four, res4) = planted_risks(m, 4 * m, 10);
    let (eight, res8) = planted_risks(m, 8 * m, 10);
    let (at, four, eight) = (Stats::of(&at).median, Stats::of(&four).median, Stats::of(&eight).median);
    assert!(res4 <= 1e-8 && res8 <= 1e-8, "training residuals {res4} {res8}");
    assert!(four * 10.0 <= at, "median risk {four} at N = 4m against {at} at N = m");
    assert!(eight < four, "median risk {eight} at N = 8m against {four} at N = 4m");
}

#[test]
fn planted_target_spec_survives_json() {
    let t = TargetFunction::<f64>::planted_random(4, 3, 0.7, split_stream(15, 0)).unwrap();
    let text = serde_json::to_string(&t.to_spec()).unwrap();
    let back = TargetFunction::<f64>::from_spec(&serde_json::from_str(&text).unwrap()).unwrap();
    let TargetParams::Planted { c0, .. } = &back.params else { panic!("kind changed") };
    assert_eq!(c0.len(), 3);
    let z = gaussian_matrix::<f64>(4, 20, 1.0, split_stream(15, 1)).unwrap();
    let diff: DVector<_> = t.eval(&z).unwrap() - back.eval(&z).unwrap();
    assert_eq!(diff.iter().map(|z| z.norm()).sum::<f64>(), 0.0);
}
