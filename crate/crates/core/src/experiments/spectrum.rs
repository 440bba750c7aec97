//! Singular value densities of the normalized feature matrix under the
//! logarithmic complexity scalings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::{draw_trial, run_ordered, Stats};
use crate::error::{Error, Result};
use crate::sampling::split_stream;
use crate::spectral::{singular_values, spectral_density, Bandwidth, DensityCurve, DensityNorm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scaling {
    /// `N = m`.
    #[serde(rename = "N=m")]
    Threshold,
    #[serde(rename = "N=m*log(m)")]
    OverLog,
    #[serde(rename = "N=m*log^3(m)")]
    OverLog3,
    #[serde(rename = "m=N*log(N)")]
    UnderLog,
    #[serde(rename = "m=N*log^3(N)")]
    UnderLog3,
}

impl Scaling {
    pub const ALL: [Scaling; 5] =
        [Scaling::UnderLog3, Scaling::UnderLog, Scaling::Threshold, Scaling::OverLog, Scaling::OverLog3];

    pub fn label(self) -> &'static str {
        match self {
            Scaling::Threshold => "N=m",
            Scaling::OverLog => "N=m*log(m)",
            Scaling::OverLog3 => "N=m*log^3(m)",
            Scaling::UnderLog => "m=N*log(N)",
            Scaling::UnderLog3 => "m=N*log^3(N)",
        }
    }

    fn code(self) -> u64 {
        match self {
            Scaling::UnderLog3 => 1,
            Scaling::UnderLog => 2,
            Scaling::Threshold => 3,
            Scaling::OverLog => 4,
            Scaling::OverLog3 => 5,
        }
    }

    /// Number of features for `m` samples, rounded to the nearest integer.
    /// The underparameterized scalings are inverted over the integers.
    pub fn features_for(self, m: usize) -> usize {
        let mf = m as f64;
        let inverse = |g: fn(f64) -> f64| {
            (1..=m)
                .min_by(|&a, &b| {
                    let ea = (a as f64 * g(a as f64) - mf).abs();
                    let eb = (b as f64 * g(b as f64) - mf).abs();
                    ea.total_cmp(&eb)
                })
                .unwrap_or(1)
        };
        match self {
            Scaling::Threshold => m,
            Scaling::OverLog => (mf * mf.ln()).round().max(1.0) as usize,
            Scaling::OverLog3 => (mf * mf.ln().powi(3)).round().max(1.0) as usize,
            Scaling::UnderLog => inverse(|n| n.ln()),
            Scaling::UnderLog3 => inverse(|n| n.ln().powi(3)),
        }
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scaling::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scaling '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingResult {
    pub scaling: Scaling,
    pub m: usize,
    pub n: usize,
    /// Singular values are of `A / sqrt(max(m, N))`.
    pub normalization: f64,
    pub sv_min: f64,
    pub sv_max: f64,
    /// Pooled `sv_min / sv_max`.
    pub sv_ratio: f64,
    pub per_trial_ratio: Stats,
    pub bandwidth: f64,
    #[serde(skip)]
    pub pooled: Vec<f64>,
    #[serde(skip)]
    pub density: DensityCurve<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub scalings: Vec<ScalingResult>,
}

impl SpectrumReport {
    pub fn get(&self, s: Scaling) -> Option<&ScalingResult> {
        self.scalings.iter().find(|r| r.scaling == s)
    }
}

/// Pooled singular values over `cfg.trials` draws per scaling, with a
/// Gaussian kernel density normalized to maximum one.
pub fn run_spectrum_density(cfg: &ExperimentConfig, scalings: &[Scaling]) -> Result<SpectrumReport> {
    cfg.validate()?;
    if scalings.is_empty() {
        return Err(Error::invalid("no scalings requested"));
    }
    let trials = cfg.trials;
    let m = cfg.m;
    let per_unit = run_ordered(cfg.workers, scalings.len() * trials, |u| {
        let scaling = scalings[u / trials];
        let trial = u % trials;
        let n = scaling.features_for(m);
        let stream = split_stream(cfg.seed, trial as u64).derive_index(scaling.code());
        let data = draw_trial(cfg.features, cfg.d, m, n, n, cfg.gamma, cfg.sigma, stream)?;
        let scale = 1.0 / (m.max(n) as f64).sqrt();
        let sv = singular_values(&data.a)?;
        Ok(sv.into_iter().map(|s| s * scale).collect::<Vec<f64>>())
    })?;

    let mut out = Vec::with_capacity(scalings.len());
    for (i, &scaling) in scalings.iter().enumerate() {
        let n = scaling.features_for(m);
        let chunk = &per_unit[i * trials..(i + 1) * trials];
        let ratios: Vec<f64> = chunk.iter().map(|sv| sv[0] / sv[sv.len() - 1]).collect();
        let pooled: Vec<f64> = chunk.iter().flatten().copied().collect();
        let sv_min = pooled.iter().copied().fold(f64::INFINITY, f64::min);
        let sv_max = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let density = spectral_density(&pooled, Bandwidth::Auto, DensityNorm::MaxOne)?;
        out.push(ScalingResult {
            scaling,
            m,
            n,
            normalization: 1.0 / (m.max(n) as f64).sqrt(),
            sv_min,
            sv_max,
            sv_ratio: sv_min / sv_max,
            per_trial_ratio: Stats::of(&ratios),
            bandwidth: density.bandwidth,
            pooled,
            density,
        });
    }
    Ok(SpectrumReport { scalings: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_counts_for_150() {
        assert_eq!(Scaling::Threshold.features_for(150), 150);
        assert_eq!(Scaling::OverLog.features_for(150), 752);
        assert_eq!(Scaling::OverLog3.features_for(150), 18_870);
        let n = Scaling::UnderLog.features_for(150);
        assert!((n as f64 * (n as f64).ln() - 150.0).abs() < 5.0, "{n}");
        let n = Scaling::UnderLog3.features_for(150);
        assert!((n as f64 * (n as f64).ln().powi(3) - 150.0).abs() < 10.0, "{n}");
    }

    #[test]
    fn labels_roundtrip() {
        for s in Scaling::ALL {
            assert_eq!(s.label().parse::<Scaling>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.label()));
        }
    }

    #[test]
    fn small_run_has_unit_max_densities() {
        let cfg = ExperimentConfig { d: 5, m: 20, gamma: 1.0, sigma: 1.0, trials: 3, ..Default::default() };
        let r = run_spectrum_density(&cfg, &Scaling::ALL).unwrap();
        for s in &r.scalings {
            let max = s.density.density.iter().copied().fold(0.0, f64::max);
            assert_eq!(max, 1.0);
            assert_eq!(s.pooled.len(), 3 * s.m.min(s.n));
            assert!(s.sv_min <= s.sv_max);
        }
        let at = r.get(Scaling::Threshold).unwrap();
        let over = r.get(Scaling::OverLog3).unwrap();
        assert!(over.sv_ratio > at.sv_ratio);
    }
}
