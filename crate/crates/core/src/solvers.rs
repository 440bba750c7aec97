//! Training of random feature coefficients.

use std::cmp::Ordering;

use nalgebra::{Complex, ComplexField, DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::RANK_TOL;

const SVD_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    LeastSquares,
    MinNorm,
    Ridge,
    Bpdn,
    Planted,
    BestPhi,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub residual_norm: Option<f64>,
    pub iterations: Option<usize>,
    pub duality_gap: Option<f64>,
    /// Set when the solver fell back to the pseudoinverse.
    pub rank_deficient: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<T: Real> {
    pub values: DVector<Complex<T>>,
    pub origin: Origin,
    pub diagnostics: Diagnostics,
}

impl<T: Real> CoefficientVector<T> {
    pub fn new(values: DVector<Complex<T>>, origin: Origin) -> Self {
        CoefficientVector { values, origin, diagnostics: Diagnostics::default() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1_norm(&self) -> T {
        l1(&self.values)
    }

    fn with_residual(mut self, a: &DMatrix<Complex<T>>, y: &DVector<Complex<T>>) -> Self {
        self.diagnostics.residual_norm = Some(residual_norm(a, &self.values, y).to_f64_lossy());
        self
    }
}

pub fn l1<T: Real>(v: &DVector<Complex<T>>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.modulus())
}

/// `||A c - y||_2`.
pub fn residual_norm<T: Real>(a: &DMatrix<Complex<T>>, c: &DVector<Complex<T>>, y: &DVector<Complex<T>>) -> T {
    (a * c - y).norm()
}

fn check_system<T: Real>(a: &DMatrix<Complex<T>>, y: &DVector<Complex<T>>) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::invalid("empty feature matrix"));
    }
    if a.nrows() != y.len() {
        return Err(Error::invalid(format!(
            "matrix has {} rows but right-hand side has length {}",
            a.nrows(),
            y.len()
        )));
    }
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
        || y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::invalid("non-finite entries in the system"));
    }
    Ok(())
}

fn diag_ratio<T: Real>(r: &DMatrix<Complex<T>>) -> (T, T) {
    let d = r.nrows().min(r.ncols());
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for i in 0..d {
        let v = r[(i, i)].modulus();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

struct ThinSvd<T: Real> {
    u: DMatrix<Complex<T>>,
    s: DVector<T>,
    v_t: DMatrix<Complex<T>>,
}

fn thin_svd<T: Real>(a: &DMatrix<Complex<T>>) -> Result<ThinSvd<T>> {
    let svd = SVD::try_new(a.clone(), true, true, T::default_epsilon(), SVD_SWEEPS).ok_or_else(|| {
        Error::NumericalFailure { context: "svd".into(), matrix_hash: crate::spectral::matrix_hash(a) }
    })?;
    Ok(ThinSvd { u: svd.u.unwrap(), s: svd.singular_values, v_t: svd.v_t.unwrap() })
}

impl<T: Real> ThinSvd<T> {
    fn cutoff(&self) -> T {
        let smax = self.s.iter().fold(T::zero(), |a, b| a.max(*b));
        T::lit(RANK_TOL) * smax
    }

    /// `V diag(g(sigma)) U* y` over the singular values above the cutoff.
    fn apply(&self, y: &DVector<Complex<T>>, g: impl Fn(T) -> T) -> DVector<Complex<T>> {
        let cut = self.cutoff();
        let mut z = self.u.ad_mul(y);
        for (i, zi) in z.iter_mut().enumerate() {
            let s = self.s[i];
            *zi = if s > cut { zi.scale(g(s)) } else { Complex::new(T::zero(), T::zero()) };
        }
        self.v_t.ad_mul(&z)
    }
}

/// Moore-Penrose pseudoinverse with the relative cutoff `1e-12 sigma_max`.
pub fn pseudoinverse<T: Real>(a: &DMatrix<Complex<T>>) -> Result<DMatrix<Complex<T>>> {
    let svd = thin_svd(a)?;
    let cut = svd.cutoff();
    let mut ut = svd.u.adjoint();
    for (i, mut row) in ut.row_iter_mut().enumerate() {
        let s = svd.s[i];
        let f = if s > cut { T::one() / s } else { T::zero() };
        row.apply(|z| *z = z.scale(f));
    }
    Ok(svd.v_t.adjoint() * ut)
}

fn pinv_solve<T: Real>(a: &DMatrix<Complex<T>>, y: &DVector<Complex<T>>) -> Result<DVector<Complex<T>>> {
    let svd = thin_svd(a)?;
    Ok(svd.apply(y, |s| T::one() / s))
}

/// `argmin ||A c - y||_2` for `m >= N` by Householder QR. A numerically
/// rank deficient `A` falls back to the pseudoinverse solution and sets
/// `rank_deficient`.
pub fn least_squares<T: Real>(a: &DMatrix<Complex<T>>, y: &DVector<Complex<T>>) -> Result<CoefficientVector<T>> {
    check_system(a, y)?;
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::invalid(format!("least squares needs m >= N, got m = {m}, N = {n}")));
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let (lo, hi) = diag_ratio(&r);
    let mut solved = None;
    if lo > T::lit(RANK_TOL) * hi {
        let mut qty = y.clone();
        qr.q_tr_mul(&mut qty);
        let rhs = qty.rows(0, n).into_owned();
        if let Some(c) = r.solve_upper_triangular(&rhs) {
            if c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                solved = Some(c);
            }
        }
    }
    let mut out = match solved {
        Some(c) => CoefficientVector::new(c, Origin::LeastSquares),
        None => {
            let mut cv = CoefficientVector::new(pinv_solve(a, y)?, Origin::LeastSquares);
            cv.diagnostics.rank_deficient = true;
            cv
        }
    };
    out = out.with_residual(a, y);
    Ok(out)
}

/// `argmin ||c||_2` subject to `A c = y`, for `m <= N`, computed from the QR
/// factorization of `A*` as `c = Q R^-* y`.
pub fn min_norm_interpolate<T: Real>(
    a: &DMatrix<Complex<T>>,
    y: &DVector<Complex<T>>,
) -> Result<CoefficientVector<T>> {
    check_system(a, y)?;
    let (m, n) = a.shape();
    if m > n {
        return Err(Error::invalid(format!("min-norm interpolation needs m <= N, got m = {m}, N = {n}")));
    }
    let qr = a.adjoint().qr();
    let r = qr.r();
    let (lo, hi) = diag_ratio(&r);
    let condition = if lo > T::zero() { (hi / lo).to_f64_lossy() } else { f64::INFINITY };
    if !(lo > T::lit(RANK_TOL) * hi) {
        return Err(Error::Singular { context: "min_norm_interpolate".into(), condition });
    }
    let z = r
        .adjoint()
        .solve_lower_triangular(y)
        .ok_or(Error::Singular { context: "min_norm_interpolate".into(), condition })?;
    let c = qr.q() * z;
    if c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Singular { context: "min_norm_interpolate".into(), condition });
    }
    Ok(CoefficientVector::new(c, Origin::MinNorm).with_residual(a, y))
}

/// Minimum norm least squares solution through the pseudoinverse, valid for
/// any shape and rank. Reported with the origin matching the regime.
pub fn pseudoinverse_solve<T: Real>(
    a: &DMatrix<Complex<T>>,
    y: &DVector<Complex<T>>,
) -> Result<CoefficientVector<T>> {
    check_system(a, y)?;
    let origin = if a.nrows() >= a.ncols() { Origin::LeastSquares } else { Origin::MinNorm };
    let mut cv = CoefficientVector::new(pinv_solve(a, y)?, origin);
    cv.diagnostics.rank_deficient = true;
    Ok(cv.with_residual(a, y))
}

/// `argmin (1/m)||A c - y||^2 + lambda ||c||^2`, i.e.
/// `c = V diag(sigma / (sigma^2 + m lambda)) U* y`.
pub fn ridge<T: Real>(a: &DMatrix<Complex<T>>, y: &DVector<Complex<T>>, lambda: T) -> Result<CoefficientVector<T>> {
    check_system(a, y)?;
    if !(lambda > T::zero() && lambda.is_finite()) {
        return Err(Error::invalid(format!("ridge parameter must be positive, got {lambda}")));
    }
    let shift = T::from_usize_lossy(a.nrows()) * lambda;
    let svd = thin_svd(a)?;
    let c = svd.apply(y, |s| s / (s * s + shift));
    Ok(CoefficientVector::new(c, Origin::Ridge).with_residual(a, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpdnOptions {
    /// Bound on both the duality gap and the constraint violation.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Iterations between duality gap evaluations.
    pub check_every: usize,
}

impl Default for BpdnOptions {
    fn default() -> Self {
        BpdnOptions { tolerance: 1e-6, max_iterations: 100_000, check_every: 10 }
    }
}

/// Projection onto `{x : ||A x - y|| <= eps}` using a thin SVD of `A`.
struct BallProjector<T: Real> {
    u: DMatrix<Complex<T>>,
    s: Vec<T>,
    v: DMatrix<Complex<T>>,
    b: DVector<Complex<T>>,
    perp2: T,
    eps: T,
}

impl<T: Real> BallProjector<T> {
    fn new(a: &DMatrix<Complex<T>>, y: &DVector<Complex<T>>, eps: T) -> Result<Self> {
        let svd = thin_svd(a)?;
        let cut = svd.cutoff();
        let keep: Vec<usize> = (0..svd.s.len()).filter(|&i| svd.s[i] > cut).collect();
        let u = DMatrix::from_fn(a.nrows(), keep.len(), |i, j| svd.u[(i, keep[j])]);
        let v = DMatrix::from_fn(a.ncols(), keep.len(), |i, j| svd.v_t[(keep[j], i)].conjugate());
        let s: Vec<T> = keep.iter().map(|&i| svd.s[i]).collect();
        let b = u.ad_mul(y);
        let perp2 = (y.norm_squared() - b.norm_squared()).max(T::zero());
        Ok(BallProjector { u, s, v, b, perp2, eps })
    }

    fn project(&self, p: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        let a = self.v.ad_mul(p);
        let r = self.s.len();
        // residual coordinates sigma_i a_i - b_i
        let c: Vec<T> = (0..r).map(|i| (a[i].scale(self.s[i]) - self.b[i]).modulus_squared()).collect();
        let eps2 = self.eps * self.eps;
        let res2 = c.iter().fold(self.perp2, |acc, x| acc + *x);
        if res2 <= eps2 {
            return p.clone();
        }
        let mut delta = DVector::from_element(r, Complex::new(T::zero(), T::zero()));
        if self.eps <= T::zero() {
            // affine projection: a_i -> b_i / sigma_i
            for i in 0..r {
                delta[i] = self.b[i].unscale(self.s[i]) - a[i];
            }
        } else {
            let mu = self.solve_mu(&c, eps2);
            for i in 0..r {
                let s = self.s[i];
                let t = T::one() + mu * s * s;
                let target = (a[i] + self.b[i].scale(mu * s)).unscale(t);
                delta[i] = target - a[i];
            }
        }
        p + &self.v * delta
    }

    /// Root of `sum_i c_i / (1 + mu s_i^2)^2 + perp2 = eps2`. The left side is
    /// convex and decreasing in `mu`, so Newton from 0 increases monotonically
    /// to the root.
    fn solve_mu(&self, c: &[T], eps2: T) -> T {
        let two = T::lit(2.0);
        let mut mu = T::zero();
        for _ in 0..500 {
            let mut g = self.perp2 - eps2;
            let mut dg = T::zero();
            for (ci, si) in c.iter().zip(&self.s) {
                let s2 = *si * *si;
                let t = T::one() + mu * s2;
                g += *ci / (t * t);
                dg -= two * *ci * s2 / (t * t * t);
            }
            if g <= T::lit(64.0) * T::EPSILON * eps2 || dg >= T::zero() {
                break;
            }
            let step = -g / dg;
            mu += step;
            if step <= T::EPSILON * mu {
                break;
            }
        }
        mu
    }

    /// `(A*)^+ z = U diag(1/s) V* z`.
    fn adjoint_pinv(&self, z: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        let mut t = self.v.ad_mul(z);
        for (i, ti) in t.iter_mut().enumerate() {
            *ti = ti.unscale(self.s[i]);
        }
        &self.u * t
    }
}

fn soft_threshold<T: Real>(z: &DVector<Complex<T>>, t: T) -> DVector<Complex<T>> {
    z.map(|v| {
        let r = v.modulus();
        if r > t {
            v.scale((r - t) / r)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

/// Dual objective `Re <lambda, y> - eps ||lambda||` of a multiplier scaled
/// into the dual feasible set `||A* lambda||_inf <= 1`.
fn dual_value<T: Real>(
    a: &DMatrix<Complex<T>>,
    y: &DVector<Complex<T>>,
    eps: T,
    lambda: &DVector<Complex<T>>,
) -> T {
    let g = a.ad_mul(lambda);
    let inf = g.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()));
    if !(inf > T::zero()) {
        return T::zero();
    }
    let scale = T::one() / inf;
    let val = lambda.dotc(y).re * scale - eps * lambda.norm() * scale;
    if val.is_finite() {
        val
    } else {
        T::zero()
    }
}

/// Basis pursuit denoising: `min ||c||_1` subject to `||A c - y||_2 <= xi sqrt(m)`.
///
/// Solved by ADMM on the splitting `c = w` between the constraint ball and
/// the l1 term, with complex soft thresholding and residual balancing of the
/// penalty. Termination needs a duality gap below `tolerance`; the returned
/// vector is the ball iterate, so it is feasible up to round-off.
pub fn bpdn<T: Real>(
    a: &DMatrix<Complex<T>>,
    y: &DVector<Complex<T>>,
    xi: T,
    options: &BpdnOptions,
) -> Result<CoefficientVector<T>> {
    check_system(a, y)?;
    if !(xi >= T::zero() && xi.is_finite()) {
        return Err(Error::invalid(format!("xi must be finite and non-negative, got {xi}")));
    }
    if !(options.tolerance > 0.0) || options.max_iterations == 0 || options.check_every == 0 {
        return Err(Error::invalid("bpdn needs a positive tolerance, iteration cap and check interval"));
    }
    let (m, n) = a.shape();
    let eps = xi * T::from_usize_lossy(m).sqrt();
    let tol = T::lit(options.tolerance);
    let zero = DVector::from_element(n, Complex::new(T::zero(), T::zero()));

    if y.norm() <= eps {
        let mut cv = CoefficientVector::new(zero, Origin::Bpdn);
        cv.diagnostics.iterations = Some(0);
        cv.diagnostics.duality_gap = Some(0.0);
        return Ok(cv.with_residual(a, y));
    }

    let proj = BallProjector::new(a, y, eps)?;
    let slack = T::lit(1e-10) * y.norm();
    if proj.perp2.sqrt() > eps + slack {
        return Err(Error::Infeasible(format!(
            "distance from y to the range of A is {:e}, above the allowed {:e}",
            proj.perp2.sqrt().to_f64_lossy(),
            eps.to_f64_lossy()
        )));
    }

    // a single feasible point: nothing to optimize
    if eps <= T::zero() && proj.s.len() == n {
        let x = proj.project(&zero);
        let mut cv = CoefficientVector::new(x, Origin::Bpdn);
        cv.diagnostics.iterations = Some(0);
        cv.diagnostics.duality_gap = Some(0.0);
        return Ok(cv.with_residual(a, y));
    }

    let mut rho = T::one();
    let mut w = zero.clone();
    let mut u = zero.clone();
    let mut gap = T::infinity();
    let ten = T::lit(10.0);
    let two = T::lit(2.0);

    for it in 1..=options.max_iterations {
        let x = proj.project(&(&w - &u));
        let w_prev = std::mem::replace(&mut w, soft_threshold(&(&x + &u), T::one() / rho));
        u += &x - &w;

        let r_primal = (&x - &w).norm();
        let r_dual = rho * (&w - &w_prev).norm();
        if r_primal > ten * r_dual {
            rho *= two;
            u /= Complex::new(two, T::zero());
        } else if r_dual > ten * r_primal {
            rho /= two;
            u *= Complex::new(two, T::zero());
        }

        if it % options.check_every == 0 || it == options.max_iterations {
            let primal = l1(&x);
            let resid = y - a * &x;
            let lambda_u = proj.adjoint_pinv(&u.map(|z| z.scale(rho)));
            let dual = dual_value(a, y, eps, &resid)
                .max(dual_value(a, y, eps, &lambda_u))
                .max(T::zero());
            gap = primal - dual;
            let violation = resid.norm() - eps;
            if gap <= tol && violation <= tol {
                let mut cv = CoefficientVector::new(x, Origin::Bpdn);
                cv.diagnostics.iterations = Some(it);
                cv.diagnostics.duality_gap = Some(gap.to_f64_lossy());
                return Ok(cv.with_residual(a, y));
            }
        }
    }
    Err(Error::NotConverged { iterations: options.max_iterations, gap: gap.to_f64_lossy() })
}

/// Order of indices by decreasing modulus, lower index first on ties.
fn by_decreasing_modulus<T: Real>(c: &DVector<Complex<T>>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..c.len()).collect();
    idx.sort_by(|&i, &j| {
        c[j].modulus()
            .partial_cmp(&c[i].modulus())
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });
    idx
}

/// Keeps the `s` largest-modulus entries and zeroes the rest.
pub fn prune_top_s<T: Real>(c: &CoefficientVector<T>, s: usize) -> Result<CoefficientVector<T>> {
    let n = c.len();
    if s == 0 || s > n {
        return Err(Error::invalid(format!("s = {s} must lie in 1..={n}")));
    }
    let order = by_decreasing_modulus(&c.values);
    let mut values = DVector::from_element(n, Complex::new(T::zero(), T::zero()));
    for &k in &order[..s] {
        values[k] = c.values[k];
    }
    Ok(CoefficientVector { values, origin: c.origin, diagnostics: c.diagnostics.clone() })
}

/// Best `s`-term approximation error in the l1 (`p = 1`) or l2 (`p = 2`) norm.
pub fn best_s_term_error<T: Real>(c: &DVector<Complex<T>>, s: usize, p: u32) -> Result<T> {
    let n = c.len();
    if s == 0 || s > n {
        return Err(Error::invalid(format!("s = {s} must lie in 1..={n}")));
    }
    let order = by_decreasing_modulus(c);
    let tail = order[s..].iter().map(|&k| c[k].modulus());
    match p {
        1 => Ok(tail.fold(T::zero(), |a, b| a + b)),
        2 => Ok(tail.fold(T::zero(), |a, b| a + b * b).sqrt()),
        _ => Err(Error::invalid(format!("p must be 1 or 2, got {p}"))),
    }
}
