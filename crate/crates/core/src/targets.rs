//! Synthetic targets and empirical risk.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::features::{activation, FeatureKind};
use crate::sampling::{gaussian_matrix, uniform_vector, NoiseModel, Purpose, RngStream};
use crate::scalar::Real;
use crate::solvers::{CoefficientVector, Origin};
use crate::theory::Regime;

/// Test points are evaluated in blocks of this many rows.
pub const EVAL_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Linear,
    Planted,
    GaussianBump,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetParams<T: Real> {
    /// `f(x) = <b, x>`.
    Linear { b: DVector<T> },
    /// `f(x) = sum_k c0_k phi(x, w_k)`.
    Planted { w: DMatrix<T>, c0: DVector<Complex<T>>, features: FeatureKind },
    /// `f(x) = exp(-||x||^2 / (2 a^2))` with the weight law `N(0, sigma^2 I)`.
    GaussianBump { a: T, sigma: T, d: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetFunction<T: Real> {
    pub params: TargetParams<T>,
    /// `||f||_rho`, when finite and known.
    pub rho_norm: Option<T>,
}

impl<T: Real> TargetFunction<T> {
    pub fn linear(b: DVector<T>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::invalid("linear target needs a non-empty coefficient vector"));
        }
        Ok(TargetFunction { params: TargetParams::Linear { b }, rho_norm: None })
    }

    /// Linear target with `b ~ U[0, 1]^d`.
    pub fn linear_random(d: usize, stream: RngStream) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Self::linear(uniform_vector(d, stream))
    }

    pub fn planted(w: DMatrix<T>, c0: DVector<Complex<T>>, features: FeatureKind) -> Result<Self> {
        if w.ncols() != c0.len() || w.ncols() == 0 || w.nrows() == 0 {
            return Err(Error::invalid(format!(
                "planted target has {} weights but {} coefficients",
                w.ncols(),
                c0.len()
            )));
        }
        Ok(TargetFunction { params: TargetParams::Planted { w, c0, features }, rho_norm: None })
    }

    /// `s` planted Fourier features with their own weights `~ N(0, sigma^2 I)`
    /// and real coefficients `~ N(0, 1/s)`.
    pub fn planted_random(d: usize, s: usize, sigma: T, stream: RngStream) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("planted target needs at least one feature"));
        }
        let w = gaussian_matrix(d, s, sigma * sigma, stream.derive(Purpose::Weights))?;
        let g = gaussian_matrix(s, 1, T::one() / T::from_usize_lossy(s), stream.derive(Purpose::Target))?;
        let c0 = DVector::from_iterator(s, g.iter().map(|v| Complex::new(*v, T::zero())));
        Self::planted(w, c0, FeatureKind::Fourier)
    }

    /// Requires `a^2 >= 1/sigma^2`, which keeps `||f||_rho = (a sigma)^d` finite.
    pub fn gaussian_bump(a: T, sigma: T, d: usize) -> Result<Self> {
        if !(a > T::zero() && sigma > T::zero()) || d == 0 {
            return Err(Error::invalid("bump width, weight scale and dimension must be positive"));
        }
        if a * a * sigma * sigma < T::one() {
            return Err(Error::invalid(format!(
                "bump width a = {a} is below 1/sigma = {}; the rho-norm would be infinite",
                T::one() / sigma
            )));
        }
        let rho = (a * sigma).powi(d as i32);
        Ok(TargetFunction { params: TargetParams::GaussianBump { a, sigma, d }, rho_norm: Some(rho) })
    }

    pub fn kind(&self) -> TargetKind {
        match self.params {
            TargetParams::Linear { .. } => TargetKind::Linear,
            TargetParams::Planted { .. } => TargetKind::Planted,
            TargetParams::GaussianBump { .. } => TargetKind::GaussianBump,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.params {
            TargetParams::Linear { b } => b.len(),
            TargetParams::Planted { w, .. } => w.nrows(),
            TargetParams::GaussianBump { d, .. } => *d,
        }
    }

    /// Values at the columns of `z` (d x M).
    pub fn eval(&self, z: &DMatrix<T>) -> Result<DVector<Complex<T>>> {
        if z.nrows() != self.dim() {
            return Err(Error::invalid(format!(
                "points have dimension {} but the target has dimension {}",
                z.nrows(),
                self.dim()
            )));
        }
        let zero = T::zero();
        Ok(match &self.params {
            TargetParams::Linear { b } => {
                DVector::from_iterator(z.ncols(), z.column_iter().map(|x| Complex::new(x.dot(b), zero)))
            }
            TargetParams::Planted { w, c0, features } => predict(w, c0, z, *features),
            TargetParams::GaussianBump { a, .. } => {
                let two_a2 = T::lit(2.0) * *a * *a;
                DVector::from_iterator(
                    z.ncols(),
                    z.column_iter().map(|x| Complex::new((-x.norm_squared() / two_a2).exp(), zero)),
                )
            }
        })
    }

    /// `alpha(w) / rho(w)` where available.
    pub fn alpha_over_rho(&self, omega: &[T]) -> Option<T> {
        match &self.params {
            TargetParams::GaussianBump { a, sigma, d } => {
                let r2 = omega.iter().fold(T::zero(), |acc, v| acc + *v * *v);
                let decay = *a * *a - T::one() / (*sigma * *sigma);
                Some((*a * *sigma).powi(*d as i32) * (-r2 * decay / T::lit(2.0)).exp())
            }
            _ => None,
        }
    }

    pub fn to_spec(&self) -> TargetSpec {
        let f = |v: T| v.to_f64_lossy();
        let params = match &self.params {
            TargetParams::Linear { b } => json!({ "b": b.iter().map(|v| f(*v)).collect::<Vec<_>>() }),
            TargetParams::Planted { w, c0, features } => json!({
                "features": features,
                "weights": w.column_iter().map(|c| c.iter().map(|v| f(*v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "c0": c0.iter().map(|z| [f(z.re), f(z.im)]).collect::<Vec<_>>(),
            }),
            TargetParams::GaussianBump { a, sigma, d } => json!({ "a": f(*a), "sigma": f(*sigma), "d": d }),
        };
        TargetSpec { kind: self.kind(), params, rho_norm: self.rho_norm.map(f) }
    }

    pub fn from_spec(spec: &TargetSpec) -> Result<Self> {
        let bad = |what: &str| Error::invalid(format!("target spec: {what}"));
        let p = &spec.params;
        let num = |v: &serde_json::Value| v.as_f64().map(T::lit).ok_or_else(|| bad("expected a number"));
        match spec.kind {
            TargetKind::Linear => {
                let b = p["b"].as_array().ok_or_else(|| bad("missing b"))?;
                let b: Result<Vec<T>> = b.iter().map(num).collect();
                Self::linear(DVector::from_vec(b?))
            }
            TargetKind::Planted => {
                let features: FeatureKind =
                    serde_json::from_value(p["features"].clone()).map_err(|_| bad("bad features"))?;
                let cols = p["weights"].as_array().ok_or_else(|| bad("missing weights"))?;
                let mut data = Vec::new();
                let mut d = None;
                for col in cols {
                    let col = col.as_array().ok_or_else(|| bad("weight column"))?;
                    if *d.get_or_insert(col.len()) != col.len() {
                        return Err(bad("ragged weights"));
                    }
                    for v in col {
                        data.push(num(v)?);
                    }
                }
                let w = DMatrix::from_vec(d.unwrap_or(0), cols.len(), data);
                let c0 = p["c0"].as_array().ok_or_else(|| bad("missing c0"))?;
                let c0: Result<Vec<Complex<T>>> = c0
                    .iter()
                    .map(|z| {
                        let pair = z.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("c0 entry"))?;
                        Ok(Complex::new(num(&pair[0])?, num(&pair[1])?))
                    })
                    .collect();
                Self::planted(w, DVector::from_vec(c0?), features)
            }
            TargetKind::GaussianBump => {
                let d = p["d"].as_u64().ok_or_else(|| bad("missing d"))? as usize;
                Self::gaussian_bump(num(&p["a"])?, num(&p["sigma"])?, d)
            }
        }
    }
}

/// Serializable description `{kind, params, rho_norm}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub params: serde_json::Value,
    pub rho_norm: Option<f64>,
}

fn predict<T: Real>(
    w: &DMatrix<T>,
    c: &DVector<Complex<T>>,
    z: &DMatrix<T>,
    kind: FeatureKind,
) -> DVector<Complex<T>> {
    let mut out = DVector::from_element(z.ncols(), Complex::new(T::zero(), T::zero()));
    let mut start = 0;
    while start < z.ncols() {
        let len = EVAL_CHUNK.min(z.ncols() - start);
        let block = z.columns(start, len);
        let phase = block.tr_mul(w);
        let feats = phase.map(|t| activation(kind, t));
        out.rows_mut(start, len).copy_from(&(feats * c));
        start += len;
    }
    out
}

/// `c*_k = alpha(w_k) / (N rho(w_k))` for the weights in the columns of `w`.
pub fn best_phi_coeffs<T: Real>(target: &TargetFunction<T>, w: &DMatrix<T>) -> Result<CoefficientVector<T>> {
    if target.kind() != TargetKind::GaussianBump {
        return Err(Error::UnsupportedTarget(format!(
            "{:?} target has no closed-form transform ratio",
            target.kind()
        )));
    }
    if w.nrows() != target.dim() {
        return Err(Error::invalid("weights and target differ in dimension"));
    }
    let n = T::from_usize_lossy(w.ncols());
    let values = DVector::from_iterator(
        w.ncols(),
        w.column_iter().map(|col| {
            let v: Vec<T> = col.iter().copied().collect();
            let r = target.alpha_over_rho(&v).expect("bump has a transform ratio");
            Complex::new(r / n, T::zero())
        }),
    );
    Ok(CoefficientVector::new(values, Origin::BestPhi))
}

/// `f#(z_j) = sum_k c_k phi(z_j, w_k)` for the columns `z_j` of `z`.
pub fn evaluate_model<T: Real>(
    w: &DMatrix<T>,
    c: &CoefficientVector<T>,
    z: &DMatrix<T>,
    kind: FeatureKind,
) -> Result<DVector<Complex<T>>> {
    if w.nrows() != z.nrows() {
        return Err(Error::invalid(format!(
            "weights have dimension {} but points have dimension {}",
            w.nrows(),
            z.nrows()
        )));
    }
    if w.ncols() != c.len() {
        return Err(Error::invalid(format!("{} weights but {} coefficients", w.ncols(), c.len())));
    }
    Ok(predict(w, &c.values, z, kind))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub empirical_risk: f64,
    pub bound_value: Option<f64>,
    pub n_test: usize,
    pub noise: NoiseModel,
    pub seeds: Vec<RngStream>,
    pub regime: Option<Regime>,
}

/// Mean of `|f(z) - f#(z)|^2` over `n_test` fresh points `z ~ N(0, data_std^2 I)`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_risk<T: Real>(
    target: &TargetFunction<T>,
    w: &DMatrix<T>,
    c: &CoefficientVector<T>,
    kind: FeatureKind,
    n_test: usize,
    data_std: T,
    stream: RngStream,
) -> Result<RiskReport> {
    if n_test == 0 {
        return Err(Error::invalid("n_test must be at least 1"));
    }
    let z = gaussian_matrix(target.dim(), n_test, data_std * data_std, stream)?;
    let truth = target.eval(&z)?;
    let pred = evaluate_model(w, c, &z, kind)?;
    let sum = truth.iter().zip(pred.iter()).fold(T::zero(), |acc, (f, g)| acc + (*f - *g).modulus_squared());
    Ok(RiskReport {
        empirical_risk: (sum / T::from_usize_lossy(n_test)).to_f64_lossy(),
        bound_value: None,
        n_test,
        noise: NoiseModel::None,
        seeds: vec![stream],
        regime: None,
    })
}

pub use crate::theory::worst_case_theta;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::split_stream;
    use crate::solvers::best_s_term_error;

    #[test]
    fn bump_requires_finite_rho_norm() {
        assert!(TargetFunction::gaussian_bump(0.5f64, 1.0, 2).is_err());
        let t = TargetFunction::gaussian_bump(2f64.sqrt(), 1.0, 10).unwrap();
        assert!((t.rho_norm.unwrap() - 32.0).abs() < 1e-12);
    }

    #[test]
    fn flat_ratio_gives_constant_coefficients() {
        // a = 1/sigma makes alpha / rho constant
        let t = TargetFunction::gaussian_bump(2.0f64, 0.5, 3).unwrap();
        let w = gaussian_matrix::<f64>(3, 7, 0.25, split_stream(1, 0)).unwrap();
        let c = best_phi_coeffs(&t, &w).unwrap();
        assert!(c.values.iter().all(|z| (z.re - 1.0 / 7.0).abs() < 1e-15 && z.im == 0.0));
    }

    #[test]
    fn coefficients_within_envelope() {
        let t = TargetFunction::gaussian_bump(1.5f64, 1.0, 4).unwrap();
        let bound = t.rho_norm.unwrap() / 1000.0;
        for seed in 0..100 {
            let w = gaussian_matrix::<f64>(4, 1000, 1.0, split_stream(seed, 0)).unwrap();
            let c = best_phi_coeffs(&t, &w).unwrap();
            assert!(c.values.iter().all(|z| z.norm() <= bound * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn best_phi_rejects_other_targets() {
        let t = TargetFunction::linear(DVector::from_vec(vec![1.0f64, 2.0])).unwrap();
        let w = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(best_phi_coeffs(&t, &w), Err(Error::UnsupportedTarget(_))));
    }

    #[test]
    fn model_evaluation_basics() {
        let w = gaussian_matrix::<f64>(2, 5, 1.0, split_stream(2, 0)).unwrap();
        let z = gaussian_matrix::<f64>(2, 600, 1.0, split_stream(2, 1)).unwrap();
        let zero = CoefficientVector::new(DVector::from_element(5, Complex::new(0.0, 0.0)), Origin::Ridge);
        let p = evaluate_model(&w, &zero, &z, FeatureKind::Fourier).unwrap();
        assert!(p.iter().all(|v| v.norm() == 0.0));

        let c1 = CoefficientVector::new(
            DVector::from_fn(5, |i, _| Complex::new(i as f64, 1.0)),
            Origin::Ridge,
        );
        let c2 = CoefficientVector::new(
            DVector::from_fn(5, |i, _| Complex::new(-0.5, i as f64 * 0.1)),
            Origin::Ridge,
        );
        let sum = CoefficientVector::new(&c1.values + &c2.values, Origin::Ridge);
        let lhs = evaluate_model(&w, &sum, &z, FeatureKind::Fourier).unwrap();
        let rhs = evaluate_model(&w, &c1, &z, FeatureKind::Fourier).unwrap()
            + evaluate_model(&w, &c2, &z, FeatureKind::Fourier).unwrap();
        assert!((lhs - rhs).camax() < 1e-10);
    }

    #[test]
    fn planted_target_is_its_own_model() {
        let t = TargetFunction::<f64>::planted_random(3, 4, 1.0, split_stream(3, 0)).unwrap();
        let TargetParams::Planted { w, c0, .. } = &t.params else { unreachable!() };
        let c = CoefficientVector::new(c0.clone(), Origin::Planted);
        let z = gaussian_matrix::<f64>(3, 50, 1.0, split_stream(3, 1)).unwrap();
        let diff = t.eval(&z).unwrap() - evaluate_model(w, &c, &z, FeatureKind::Fourier).unwrap();
        assert!(diff.camax() < 1e-10);
        let r = empirical_risk(&t, w, &c, FeatureKind::Fourier, 200, 1.0, split_stream(3, 2)).unwrap();
        assert!(r.empirical_risk <= 1e-20);
    }

    #[test]
    fn unit_offset_has_unit_risk() {
        // a planted model equal to the target plus the constant feature w = 0
        let t = TargetFunction::<f64>::planted_random(2, 3, 1.0, split_stream(4, 0)).unwrap();
        let TargetParams::Planted { w, c0, .. } = &t.params else { unreachable!() };
        let w2 = w.clone().insert_column(3, 0.0);
        let c2 = CoefficientVector::new(c0.clone().insert_row(3, Complex::new(1.0, 0.0)), Origin::Planted);
        let n = 2000;
        let r = empirical_risk(&t, &w2, &c2, FeatureKind::Fourier, n, 1.0, split_stream(4, 1)).unwrap();
        assert!((r.empirical_risk - 1.0).abs() <= 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn zero_model_risk_matches_quadrature() {
        // E|f|^2 = E exp(-||x||^2 / a^2) = (1 + 2 gamma^2 / a^2)^(-d/2)
        let (a, d, gamma) = (1.5f64, 2usize, 1.0f64);
        let t = TargetFunction::gaussian_bump(a, 1.0, d).unwrap();
        let w = DMatrix::<f64>::zeros(d, 1);
        let zero = CoefficientVector::new(DVector::from_element(1, Complex::new(0.0, 0.0)), Origin::Ridge);
        let n = 20_000;
        let r = empirical_risk(&t, &w, &zero, FeatureKind::Fourier, n, gamma, split_stream(5, 0)).unwrap();
        let exact = (1.0 + 2.0 * gamma * gamma / (a * a)).powf(-(d as f64) / 2.0);
        // second moment E|f|^4 bounds the variance
        let m4 = (1.0 + 4.0 * gamma * gamma / (a * a)).powf(-(d as f64) / 2.0);
        let se = ((m4 - exact * exact) / n as f64).sqrt();
        assert!((r.empirical_risk - exact).abs() <= 3.0 * se, "{} vs {exact}", r.empirical_risk);
    }

    #[test]
    fn worst_case_theta_dominates_actual() {
        let t = TargetFunction::gaussian_bump(1.2f64, 1.0, 3).unwrap();
        for seed in 0..20 {
            let w = gaussian_matrix::<f64>(3, 50, 1.0, split_stream(6, seed)).unwrap();
            let c = best_phi_coeffs(&t, &w).unwrap();
            for s in [1, 5, 25, 50] {
                let actual = best_s_term_error(&c.values, s, 1).unwrap();
                assert!(actual <= worst_case_theta(s, 50, t.rho_norm.unwrap()).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn spec_roundtrip() {
        let targets = vec![
            TargetFunction::<f64>::linear_random(3, split_stream(7, 0)).unwrap(),
            TargetFunction::<f64>::planted_random(3, 2, 0.5, split_stream(7, 1)).unwrap(),
            TargetFunction::<f64>::gaussian_bump(1.5, 1.0, 3).unwrap(),
        ];
        for t in targets {
            let json = serde_json::to_string(&t.to_spec()).unwrap();
            let spec: TargetSpec = serde_json::from_str(&json).unwrap();
            let back = TargetFunction::<f64>::from_spec(&spec).unwrap();
            assert_eq!(back, t);
        }
    }
}
