//! Random Fourier feature matrices: conditioning, restricted isometry
//! constants, closed-form risk bounds and the double descent experiments.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`). The
//! experiment harness in [`experiments`] runs in `f64`; the aliases at the
//! bottom of this file name the concrete double precision types.

// `!(x > 0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod features;
pub mod sampling;
pub mod scalar;
pub mod solvers;
pub mod spectral;
pub mod targets;
pub mod theory;

pub use error::{Error, Result};
pub use features::{
    fourier_features, normalized, relu_features, sample_features, FeatureDraw, FeatureKind,
    FeatureMatrix, FeatureMeta, Normalization,
};
pub use sampling::{gaussian_matrix, noise_vector, split_stream, NoiseModel, Purpose, RngStream};
pub use scalar::Real;
pub use solvers::{
    best_s_term_error, bpdn, least_squares, min_norm_interpolate, prune_top_s, pseudoinverse, ridge,
    BpdnOptions, CoefficientVector, Diagnostics, Origin,
};
pub use spectral::{
    condition_number, gram_spectrum, rip_constant_exact, rip_constant_lower_mc, singular_values,
    spectral_density, Bandwidth, DensityCurve, DensityNorm, RipEstimate, RipMethod, Side,
    SpectralSummary,
};
pub use targets::{
    best_phi_coeffs, empirical_risk, evaluate_model, worst_case_theta, RiskReport, TargetFunction,
    TargetKind, TargetSpec,
};
pub use theory::{RegimeReport, TheoryConstants};

pub use nalgebra::Complex;

pub type FeatureMatrix64 = FeatureMatrix<f64>;
pub type FeatureMatrix32 = FeatureMatrix<f32>;
pub type SpectralSummary64 = SpectralSummary<f64>;
pub type RipEstimate64 = RipEstimate<f64>;
pub type DensityCurve64 = DensityCurve<f64>;
pub type CoefficientVector64 = CoefficientVector<f64>;
pub type TargetFunction64 = TargetFunction<f64>;
