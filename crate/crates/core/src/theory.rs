//! Closed-form constants, conditions and risk bounds for random Fourier
//! feature matrices under Gaussian data and weights.
//!
//! All logarithms are natural. Every `>=` condition passes at equality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper end of the admissible `eta` range, `(sqrt(89) - 5) / 8`.
pub fn eta_max() -> f64 {
    (89f64.sqrt() - 5.0) / 8.0
}

/// Finite bound on the chaining constant.
pub const C_TILDE1: f64 = 37.97;

/// Large-`m` limit of the chaining constant, `4 sqrt(2 e)`.
pub fn c_tilde1_limit() -> f64 {
    4.0 * std::f64::consts::SQRT_2 * std::f64::consts::E
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub c_tilde1: f64,
    /// Universal constant `C` of the complexity conditions. `None` means
    /// `4 C_tilde1^2`, which makes `C eta^-2` equal to `C2(eta)`.
    pub c_universal: Option<f64>,
    /// Constant of the min-norm risk bound.
    pub c_tilde: f64,
    pub c_prime: f64,
    pub c_dprime: f64,
    /// Set when `C` was replaced by 1 for desk-scale runs.
    pub permissive: bool,
}

impl Default for TheoryConstants {
    fn default() -> Self {
        TheoryConstants {
            c_tilde1: C_TILDE1,
            c_universal: None,
            c_tilde: 16.0,
            c_prime: 10.0,
            c_dprime: 10.0,
            permissive: false,
        }
    }
}

impl TheoryConstants {
    /// Same bound constants, with `C = 1` in every complexity condition.
    pub fn permissive() -> Self {
        TheoryConstants { c_universal: Some(1.0), permissive: true, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("c_tilde1", self.c_tilde1),
            ("c_tilde", self.c_tilde),
            ("c_prime", self.c_prime),
            ("c_dprime", self.c_dprime),
            ("c_universal", self.c_universal.unwrap_or(1.0)),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `C1 <= (200 eta + 355)/eta + 200/(s eta^2)`.
    pub fn c1_of(&self, eta: f64, s: usize) -> f64 {
        (200.0 * eta + 355.0) / eta + 200.0 / (s as f64 * eta * eta)
    }

    /// `C2 = 4 C_tilde1^2 / eta^2`.
    pub fn c2_of(&self, eta: f64) -> f64 {
        4.0 * self.c_tilde1 * self.c_tilde1 / (eta * eta)
    }

    pub fn c(&self) -> f64 {
        self.c_universal.unwrap_or(4.0 * self.c_tilde1 * self.c_tilde1)
    }

    pub fn mode(&self) -> &'static str {
        if self.permissive {
            "permissive"
        } else {
            "strict"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl Condition {
    pub fn at_least(name: &str, lhs: f64, rhs: f64) -> Self {
        Condition { name: name.to_string(), lhs, rhs, ok: lhs >= rhs }
    }
}

fn all_ok(conditions: &[Condition]) -> bool {
    conditions.iter().all(|c| c.ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Under,
    Over,
    Interpolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub eta: f64,
    pub band: (f64, f64),
    pub conditions: Vec<Condition>,
    pub failure_probability: Option<f64>,
}

impl RegimeReport {
    pub fn satisfied(&self) -> bool {
        all_ok(&self.conditions)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < eta_max() {
        Ok(())
    } else {
        Err(Error::invalid(format!("eta must lie in (0, {:.6}), got {eta}", eta_max())))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")))
    }
}

/// `beta = (2 gamma^2 sigma^2 + 1)^(-d/2)`, the modulus of
/// `E exp(i <x, w_j - w_k>)` for distinct Gaussian weights.
pub fn beta_overlap<T: Real>(gamma: T, sigma: T, d: usize) -> T {
    let base = T::lit(2.0) * gamma * gamma * sigma * sigma + T::one();
    base.powf(-T::from_usize_lossy(d) / T::lit(2.0))
}

/// `(1 - 5 eta/4 - eta^2, 1 + 5 eta/4 + eta^2)`.
pub fn eig_band<T: Real>(eta: T) -> Result<(T, T)> {
    check_eta(eta.to_f64_lossy())?;
    let w = T::lit(1.25) * eta + eta * eta;
    Ok((T::one() - w, T::one() + w))
}

/// Ratio of the band ends, an upper bound on the condition number of the
/// normalized Gram matrix.
pub fn k_eta<T: Real>(eta: T) -> Result<T> {
    let (lo, hi) = eig_band(eta)?;
    Ok(hi / lo)
}

/// `eta1^2/2 + eta1 sqrt(eta1^2/4 + eta2 + 1) + eta2 + eta3`.
pub fn rip_bound_f<T: Real>(eta1: T, eta2: T, eta3: T) -> Result<T> {
    for (i, e) in [eta1, eta2, eta3].into_iter().enumerate() {
        if !(e > T::zero() && e < T::one()) {
            return Err(Error::invalid(format!("eta{} must lie in (0, 1), got {e}", i + 1)));
        }
    }
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    Ok(half * eta1 * eta1 + eta1 * (quarter * eta1 * eta1 + eta2 + T::one()).sqrt() + eta2 + eta3)
}

/// Smallest `gamma sigma` with `s beta(gamma, sigma, d) <= eta2`:
/// `sqrt(((s/eta2)^(2/d) - 1) / 2)`.
///
/// `eta2 = 1` is accepted so that `s / eta2 = 1` gives 0.
pub fn kappa_threshold<T: Real>(eta2: T, s: usize, d: usize) -> Result<T> {
    if !(eta2 > T::zero() && eta2 <= T::one()) {
        return Err(Error::invalid(format!("eta2 must lie in (0, 1], got {eta2}")));
    }
    if s == 0 || d == 0 {
        return Err(Error::invalid("s and d must be positive"));
    }
    let ratio = T::from_usize_lossy(s) / eta2;
    let p = ratio.powf(T::lit(2.0) / T::from_usize_lossy(d));
    Ok(((p - T::one()) / T::lit(2.0)).max(T::zero()).sqrt())
}

/// Bounds at `m = N`: upper bound on `E lambda_min((1/N) A*A)` and lower
/// bound on `E lambda_max`.
pub fn interpolation_expectation_bounds<T: Real>(n: usize, gamma: T, sigma: T, d: usize) -> Result<(T, T)> {
    if n < 2 {
        return Err(Error::invalid(format!("N must be at least 2, got {n}")));
    }
    let nf = T::from_usize_lossy(n);
    let inv = T::one() / nf;
    let base = T::lit(4.0) * gamma * gamma * sigma * sigma + T::one();
    let decay = base.powf(-T::from_usize_lossy(d) / T::lit(4.0));
    let lo = (T::one() - inv).sqrt() * decay + inv;
    let hi = T::lit(2.0) - inv;
    Ok((lo, hi))
}

/// Level `(4 gamma^2 sigma^2 + 1)^(-d/4) + N^(-1/2)` that `lambda_min` exceeds
/// with probability at most `N^(-1/2)`.
pub fn markov_threshold<T: Real>(n: usize, gamma: T, sigma: T, d: usize) -> T {
    let base = T::lit(4.0) * gamma * gamma * sigma * sigma + T::one();
    base.powf(-T::from_usize_lossy(d) / T::lit(4.0)) + T::one() / T::from_usize_lossy(n).sqrt()
}

/// Approximation level
/// `(2/sqrt N)(1 + 4 gamma sigma d sqrt(1 + sqrt((12/d) ln(m/delta))) + sqrt(ln(1/delta)/2))`.
pub fn epsilon_bound<T: Real>(n: usize, m: usize, d: usize, gamma: T, sigma: T, delta: T) -> Result<T> {
    check_delta(delta.to_f64_lossy())?;
    if n == 0 || m == 0 || d == 0 {
        return Err(Error::invalid("N, m and d must be positive"));
    }
    let df = T::from_usize_lossy(d);
    let inner = (T::lit(12.0) / df * (T::from_usize_lossy(m) / delta).ln()).sqrt();
    let tail = (T::lit(0.5) * (T::one() / delta).ln()).sqrt();
    let body = T::one() + T::lit(4.0) * gamma * sigma * df * (T::one() + inner).sqrt() + tail;
    Ok(T::lit(2.0) / T::from_usize_lossy(n).sqrt() * body)
}

/// Radius `gamma sqrt(d + sqrt(12 d ln(m/delta)))` containing all `m`
/// samples with probability at least `1 - delta`.
pub fn ball_radius<T: Real>(gamma: T, d: usize, m: usize, delta: T) -> Result<T> {
    check_delta(delta.to_f64_lossy())?;
    let df = T::from_usize_lossy(d);
    let l = (T::from_usize_lossy(m) / delta).ln();
    Ok(gamma * (df + (T::lit(12.0) * df * l).sqrt()).sqrt())
}

/// `ceil((1/eps^2)(1 + sqrt(2 ln(1/delta)))^2)`.
pub fn min_features_for_accuracy(epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    let root = 1.0 + (2.0 * (1.0 / delta).ln()).sqrt();
    let x = root * root / (epsilon * epsilon);
    // absorb the rounding in 1/eps^2 so that exact integers stay put
    Ok((x * (1.0 - 1e-12)).ceil() as u64)
}

/// Worst case of the best 1-term error of the best-phi coefficients,
/// `(1 - s/N) ||f||_rho`.
pub fn worst_case_theta(s: usize, n: usize, f_rho_norm: f64) -> Result<f64> {
    if s == 0 || s > n {
        return Err(Error::invalid(format!("s = {s} must lie in 1..={n}")));
    }
    Ok((1.0 - s as f64 / n as f64) * f_rho_norm)
}

/// Denoising level `sqrt(2 (eps^2 ||f||_rho + E^2))` of the basis pursuit
/// program. Note the first term carries `||f||_rho` to the first power.
pub fn xi_bp(epsilon: f64, f_rho_norm: f64, noise_bound: f64) -> f64 {
    (2.0 * (epsilon * epsilon * f_rho_norm + noise_bound * noise_bound)).sqrt()
}

fn ln(x: f64) -> f64 {
    x.ln()
}

fn log_failure(n: f64, m: f64) -> f64 {
    // n^(-ln^2(n) ln(3m)) = exp(-ln^3(n) ln(3m))
    (-(ln(n).powi(3)) * ln(3.0 * m)).exp()
}

fn complexity_conditions(big: usize, small: usize, d: usize, gs: f64, eta: f64, c: f64) -> Vec<Condition> {
    let (bf, sf) = (big as f64, small as f64);
    let lhs = bf / ln(3.0 * bf);
    let scale = c / (eta * eta) * sf;
    let simple = scale * ln(sf).powi(3);
    let tight = scale * ln(sf).powi(2) * ln(3.0 + sf / (9.0 * ln(2.0 * bf)));
    let uncertainty = eta / 20.0 * (2.0 * gs * gs + 1.0).powf(d as f64 / 2.0);
    vec![
        Condition::at_least("complexity", lhs, simple),
        Condition::at_least("complexity_tight", lhs, tight),
        Condition::at_least("uncertainty", uncertainty, sf),
    ]
}

/// Complexity conditions for the regime selected by the sign of `m - N`.
pub fn check_regime_conditions(
    m: usize,
    n: usize,
    d: usize,
    gamma: f64,
    sigma: f64,
    eta: f64,
    constants: &TheoryConstants,
) -> Result<RegimeReport> {
    check_eta(eta)?;
    constants.validate()?;
    if m < 2 || n < 2 {
        return Err(Error::invalid(format!("m and N must be at least 2, got m = {m}, N = {n}")));
    }
    let band = eig_band(eta)?;
    let gs = gamma * sigma;
    let c = constants.c();
    let (regime, conditions, failure_probability) = if m > n {
        (Regime::Under, complexity_conditions(m, n, d, gs, eta, c), Some(log_failure(n as f64, m as f64)))
    } else if m < n {
        (Regime::Over, complexity_conditions(n, m, d, gs, eta, c), Some(log_failure(m as f64, n as f64)))
    } else {
        (Regime::Interpolation, Vec::new(), None)
    };
    Ok(RegimeReport { regime, eta, band, conditions, failure_probability })
}

/// Inputs shared by the risk bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub gamma: f64,
    pub sigma: f64,
    pub delta: f64,
    pub f_rho_norm: f64,
    /// Noise bound `E`.
    pub noise_bound: f64,
}

impl BoundInputs {
    fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        if self.n == 0 || self.m == 0 || self.d == 0 {
            return Err(Error::invalid("N, m and d must be positive"));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("sigma", self.sigma),
            ("f_rho_norm", self.f_rho_norm),
            ("noise bound", self.noise_bound),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn epsilon(&self) -> Result<f64> {
        epsilon_bound(self.n, self.m, self.d, self.gamma, self.sigma, self.delta)
    }

    fn sqrt_log_delta(&self) -> f64 {
        ln(1.0 / self.delta).sqrt()
    }
}

/// A risk bound together with the conditions under which it is proved.
///
/// The value is computed even when a condition fails; `warning` is then set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub epsilon: f64,
    pub conditions: Vec<Condition>,
    pub warning: bool,
}

impl BoundReport {
    fn new(value: f64, epsilon: f64, conditions: Vec<Condition>) -> Self {
        let warning = !all_ok(&conditions);
        BoundReport { value, epsilon, conditions, warning }
    }
}

/// Least squares bound for `m > N`:
/// `16 K(eta) (1 + N m^-1/2 sqrt(ln 1/delta)) (eps^2 ||f||^2 + E^2)`.
pub fn risk_bound_ls(p: &BoundInputs, eta: f64, constants: &TheoryConstants) -> Result<BoundReport> {
    p.validate()?;
    constants.validate()?;
    let k = k_eta(eta)?;
    let eps = p.epsilon()?;
    let (nf, mf) = (p.n as f64, p.m as f64);
    let value = 16.0
        * k
        * (1.0 + nf / mf.sqrt() * p.sqrt_log_delta())
        * (eps * eps * p.f_rho_norm * p.f_rho_norm + p.noise_bound * p.noise_bound);
    let mut conditions = vec![Condition::at_least("m > N", mf, nf + 1.0)];
    if p.n >= 2 {
        let cs = complexity_conditions(p.m, p.n, p.d, p.gamma * p.sigma, eta, constants.c());
        conditions.extend(cs);
        conditions.push(Condition::at_least("delta", p.delta, log_failure(nf, mf)));
    }
    Ok(BoundReport::new(value, eps, conditions))
}

/// Min-norm bound for `m < N`:
/// `C~ sqrt(ln 1/delta)(m^-1/2 + K m^1/2 eps^2)||f||^2 + C~ m^1/2 K sqrt(ln 1/delta) E^2`.
pub fn risk_bound_minnorm(p: &BoundInputs, eta: f64, constants: &TheoryConstants) -> Result<BoundReport> {
    p.validate()?;
    constants.validate()?;
    let k = k_eta(eta)?;
    let eps = p.epsilon()?;
    let (nf, mf) = (p.n as f64, p.m as f64);
    let ct = constants.c_tilde;
    let l = p.sqrt_log_delta();
    let f2 = p.f_rho_norm * p.f_rho_norm;
    let value = ct * l * (1.0 / mf.sqrt() + k * mf.sqrt() * eps * eps) * f2
        + ct * mf.sqrt() * k * l * p.noise_bound * p.noise_bound;
    let mut conditions = vec![Condition::at_least("N > m", nf, mf + 1.0)];
    if p.m >= 2 {
        let cs = complexity_conditions(p.n, p.m, p.d, p.gamma * p.sigma, eta, constants.c());
        conditions.extend(cs);
        conditions.push(Condition::at_least("delta", p.delta, log_failure(mf, nf)));
    }
    Ok(BoundReport::new(value, eps, conditions))
}

/// Sparse regression bound:
/// `C' (1 + N m^-1/2 sqrt(ln 1/delta))(eps^2 ||f||^2 + E^2)
///  + C'' (1 + N m^-1/2 s^-1 sqrt(ln 1/delta)) theta^2`.
pub fn risk_bound_bp(
    p: &BoundInputs,
    s: usize,
    theta_s1: f64,
    constants: &TheoryConstants,
) -> Result<BoundReport> {
    p.validate()?;
    constants.validate()?;
    if s == 0 || s > p.n {
        return Err(Error::invalid(format!("s = {s} must lie in 1..={}", p.n)));
    }
    if !(theta_s1 >= 0.0 && theta_s1.is_finite()) {
        return Err(Error::invalid(format!("theta must be finite and non-negative, got {theta_s1}")));
    }
    let eps = p.epsilon()?;
    let (nf, mf, sf) = (p.n as f64, p.m as f64, s as f64);
    let l = p.sqrt_log_delta();
    let value = constants.c_prime
        * (1.0 + nf / mf.sqrt() * l)
        * (eps * eps * p.f_rho_norm * p.f_rho_norm + p.noise_bound * p.noise_bound)
        + constants.c_dprime * (1.0 + nf / mf.sqrt() / sf * l) * theta_s1 * theta_s1;
    let gs = p.gamma * p.sigma;
    let two_s = ln(2.0 * sf);
    let conditions = vec![
        Condition::at_least(
            "complexity",
            mf / ln(3.0 * mf),
            constants.c() * sf * two_s * two_s * ln(nf),
        ),
        Condition::at_least("uncertainty", (2.0 * gs * gs + 1.0).powf(p.d as f64 / 2.0) / 105.0, sf),
        Condition::at_least("delta", p.delta, (-(two_s * two_s) * ln(3.0 * mf) * ln(nf)).exp()),
    ];
    Ok(BoundReport::new(value, eps, conditions))
}

/// Conditions of the restricted isometry estimate with
/// `(eta1, eta2, eta3) = (eta, eta/20, eta/5)` and failure probability `eps`.
#[allow(clippy::too_many_arguments)]
pub fn rip_estimate_conditions(
    m: usize,
    n: usize,
    s: usize,
    d: usize,
    gamma: f64,
    sigma: f64,
    eta: f64,
    eps: f64,
    constants: &TheoryConstants,
) -> Result<Vec<Condition>> {
    check_eta(eta)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("failure probability must lie in (0, 1), got {eps}")));
    }
    if s == 0 || s > n || m == 0 {
        return Err(Error::invalid("need 1 <= s <= N and m >= 1"));
    }
    let (mf, nf, sf) = (m as f64, n as f64, s as f64);
    let kappa = kappa_threshold(eta / 20.0, s, d)?;
    Ok(vec![
        Condition::at_least("sample_count", mf, constants.c1_of(eta, s) * sf * ln(1.0 / eps)),
        Condition::at_least(
            "complexity_tight",
            mf / ln(3.0 * mf),
            constants.c2_of(eta) * sf * ln(sf).powi(2) * ln(3.0 + nf / (9.0 * ln(2.0 * mf))),
        ),
        Condition::at_least("gamma_sigma", gamma * sigma, kappa),
    ])
}

/// Parameter point for [`theory_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub gamma: f64,
    pub sigma: f64,
    pub eta: f64,
    pub delta: f64,
    pub s: usize,
    pub f_rho_norm: f64,
    pub noise_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationBounds {
    pub lambda_min_upper: f64,
    pub lambda_max_lower: f64,
    pub markov_threshold: f64,
    pub markov_probability: f64,
}

/// Every closed-form quantity evaluated at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub point: TheoryPoint,
    pub constants_mode: String,
    pub constants: TheoryConstants,
    pub beta: f64,
    pub band: (f64, f64),
    pub k_eta: f64,
    pub rip_f: f64,
    pub kappa_threshold: f64,
    pub c1: f64,
    pub c2: f64,
    pub epsilon: f64,
    pub xi: f64,
    pub ball_radius: f64,
    pub interpolation: Option<InterpolationBounds>,
    pub regime: RegimeReport,
    pub rip_conditions: Vec<Condition>,
    pub risk_ls: BoundReport,
    pub risk_minnorm: BoundReport,
    pub risk_bp: BoundReport,
    pub worst_case_theta: f64,
}

pub fn theory_report(pt: &TheoryPoint, constants: &TheoryConstants) -> Result<TheoryReport> {
    let small = pt.m.min(pt.n);
    let regime = check_regime_conditions(pt.m, pt.n, pt.d, pt.gamma, pt.sigma, pt.eta, constants)?;
    let inputs = BoundInputs {
        n: pt.n,
        m: pt.m,
        d: pt.d,
        gamma: pt.gamma,
        sigma: pt.sigma,
        delta: pt.delta,
        f_rho_norm: pt.f_rho_norm,
        noise_bound: pt.noise_bound,
    };
    let epsilon = inputs.epsilon()?;
    let theta = worst_case_theta(pt.s, pt.n, pt.f_rho_norm)?;
    let interpolation = if pt.m == pt.n {
        let (lo, hi) = interpolation_expectation_bounds(pt.n, pt.gamma, pt.sigma, pt.d)?;
        Some(InterpolationBounds {
            lambda_min_upper: lo,
            lambda_max_lower: hi,
            markov_threshold: markov_threshold(pt.n, pt.gamma, pt.sigma, pt.d),
            markov_probability: 1.0 / (pt.n as f64).sqrt(),
        })
    } else {
        None
    };
    let rip_conditions = rip_estimate_conditions(
        pt.m.max(pt.n),
        pt.m.max(pt.n),
        small,
        pt.d,
        pt.gamma,
        pt.sigma,
        pt.eta,
        log_failure(small as f64, pt.m.max(pt.n) as f64).max(f64::MIN_POSITIVE),
        constants,
    )?;
    Ok(TheoryReport {
        point: *pt,
        constants_mode: constants.mode().to_string(),
        constants: *constants,
        beta: beta_overlap(pt.gamma, pt.sigma, pt.d),
        band: eig_band(pt.eta)?,
        k_eta: k_eta(pt.eta)?,
        rip_f: rip_bound_f(pt.eta, pt.eta / 20.0, pt.eta / 5.0)?,
        kappa_threshold: kappa_threshold(pt.eta / 20.0, small, pt.d)?,
        c1: constants.c1_of(pt.eta, small),
        c2: constants.c2_of(pt.eta),
        epsilon,
        xi: xi_bp(epsilon, pt.f_rho_norm, pt.noise_bound),
        ball_radius: ball_radius(pt.gamma, pt.d, pt.m, pt.delta)?,
        interpolation,
        regime,
        rip_conditions,
        risk_ls: risk_bound_ls(&inputs, pt.eta, constants)?,
        risk_minnorm: risk_bound_minnorm(&inputs, pt.eta, constants)?,
        risk_bp: risk_bound_bp(&inputs, pt.s, theta, constants)?,
        worst_case_theta: theta,
    })
}
