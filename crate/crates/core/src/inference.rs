//! Lynden-Bell integrals, the plug-in influence function, the plug-in
//! asymptotic variance and normal confidence intervals. Only observed data
//! enter here; model-based quantities live in [`crate::represent`].

use alloc::vec::Vec;

use thiserror::Error;

use crate::estimator::{lynden_bell, modified_weights, LBEstimate, ModifiedEstimate};
use crate::normal;
use crate::sample::SortedSample;
use crate::score::{ScoreError, ScoreFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("score function undefined at support point {0}")]
    ScoreUndefinedAt(f64),
    #[error("variance needs at least two observations, got {0}")]
    DegenerateSample(usize),
    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),
}

impl InferenceError {
    pub fn code(&self) -> &'static str {
        match self {
            InferenceError::ScoreUndefinedAt(_) => "ScoreUndefinedAt",
            InferenceError::DegenerateSample(_) => "DegenerateSample",
            InferenceError::InvalidLevel(_) => "InvalidLevel",
        }
    }
}

impl From<ScoreError> for InferenceError {
    fn from(e: ScoreError) -> Self {
        InferenceError::ScoreUndefinedAt(e.0)
    }
}

fn scores_at(points: &[f64], phi: &ScoreFunction) -> Result<Vec<f64>, InferenceError> {
    points
        .iter()
        .map(|&x| phi.eval(x).map_err(InferenceError::from))
        .collect()
}

fn weighted_sum(weights: &[f64], scores: &[f64]) -> f64 {
    weights.iter().zip(scores).map(|(w, s)| w * s).sum()
}

/// `∫φ dF_n = Σ W_i φ(X_i)`.
pub fn lb_integral(est: &LBEstimate, phi: &ScoreFunction) -> Result<f64, InferenceError> {
    Ok(weighted_sum(est.weights(), &scores_at(est.points(), phi)?))
}

/// `∫φ dF̂_n = Σ Ŵ_i φ(X_i)`.
pub fn modified_integral(
    est: &ModifiedEstimate,
    phi: &ScoreFunction,
) -> Result<f64, InferenceError> {
    Ok(weighted_sum(est.weights(), &scores_at(est.points(), phi)?))
}

/// `ψ_n(y) = Σ_{X_k > y} W_k [φ(y) - φ(X_k)]`.
pub fn psi_plugin(est: &LBEstimate, phi: &ScoreFunction, y: f64) -> Result<f64, InferenceError> {
    let first = est.points().partition_point(|&x| x <= y);
    if first == est.points().len() {
        return Ok(0.0);
    }
    let at_y = phi.eval(y)?;
    let mut acc = 0.0;
    for (&x, &w) in est.points()[first..].iter().zip(&est.weights()[first..]) {
        acc += w * (at_y - phi.eval(x)?);
    }
    Ok(acc)
}

/// Plug-in influence values `η̂_i`, one per observation in row order:
///
/// `η̂_i = ψ_n(X_i)/C_n(X_i) - n⁻¹ Σ_{j : Y_i < X_j <= X_i} ψ_n(X_j)/C_n(X_j)²`.
///
/// `ψ_n` at the sample points comes from suffix sums and the inner sum from
/// prefix sums over distinct points, so the cost is `O(n log n)`.
pub fn influence_values(
    sample: &SortedSample,
    est: &LBEstimate,
    phi: &ScoreFunction,
) -> Result<Vec<f64>, InferenceError> {
    let n = sample.n() as f64;
    let m = sample.m();
    let points = est.points();
    let weights = est.weights();
    let scores = scores_at(points, phi)?;

    // ψ_n(X_k) = φ(X_k) Σ_{l>k} W_l - Σ_{l>k} W_l φ(X_l)
    let mut psi = alloc::vec![0.0; m];
    let (mut tail_w, mut tail_wphi) = (0.0, 0.0);
    for k in (0..m).rev() {
        psi[k] = scores[k] * tail_w - tail_wphi;
        tail_w += weights[k];
        tail_wphi += weights[k] * scores[k];
    }

    let risk = sample.risk_counts();
    let mut ratio = Vec::with_capacity(m);
    // prefix[k] = n⁻¹ Σ_{l<k} d_l ψ_n(X_l) / C_n(X_l)²
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for k in 0..m {
        let c = risk[k] as f64 / n;
        ratio.push(psi[k] / c);
        acc += sample.mult()[k] as f64 * psi[k] / (c * c) / n;
        prefix.push(acc);
    }

    let mut eta = alloc::vec![0.0; sample.n()];
    for k in 0..m {
        let upper = prefix[k + 1];
        for &row in sample.rows_at(k) {
            let y = sample.y_values()[row];
            let lower = prefix[points.partition_point(|&x| x <= y)];
            eta[row] = ratio[k] - (upper - lower);
        }
    }
    Ok(eta)
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Plug-in asymptotic variance: the `n`-divisor empirical variance of the
/// influence values from [`influence_values`].
pub fn sigma2_plugin(sample: &SortedSample, phi: &ScoreFunction) -> Result<f64, InferenceError> {
    sigma2_with(sample, &lynden_bell(sample), phi)
}

/// As [`sigma2_plugin`], reusing an estimate computed from `sample`.
pub fn sigma2_with(
    sample: &SortedSample,
    est: &LBEstimate,
    phi: &ScoreFunction,
) -> Result<f64, InferenceError> {
    if sample.n() < 2 {
        return Err(InferenceError::DegenerateSample(sample.n()));
    }
    if phi.is_constant() {
        return Ok(0.0);
    }
    Ok(population_variance(&influence_values(sample, est, phi)?))
}

/// Which estimator a confidence interval is centred on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    LyndenBell,
    Modified,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::LyndenBell => "lynden-bell",
            EstimatorKind::Modified => "modified",
        }
    }
}

/// Point estimate with its plug-in variance and normal interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceResult {
    pub estimate: f64,
    pub sigma2: f64,
    pub ci: (f64, f64),
    pub level: f64,
    pub n: usize,
}

impl InferenceResult {
    /// `estimate ± z_{(1+level)/2} · sqrt(sigma2 / n)`.
    pub fn from_parts(
        estimate: f64,
        sigma2: f64,
        n: usize,
        level: f64,
    ) -> Result<Self, InferenceError> {
        if !(level > 0.0 && level < 1.0) {
            return Err(InferenceError::InvalidLevel(level));
        }
        let half = normal::quantile((1.0 + level) / 2.0) * libm::sqrt(sigma2 / n as f64);
        Ok(InferenceResult {
            estimate,
            sigma2,
            ci: (estimate - half, estimate + half),
            level,
            n,
        })
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci.0 <= value && value <= self.ci.1
    }

    pub fn width(&self) -> f64 {
        self.ci.1 - self.ci.0
    }
}

/// Confidence interval for `∫φ dF` centred on the Lynden-Bell integral.
pub fn confidence_interval(
    sample: &SortedSample,
    phi: &ScoreFunction,
    level: f64,
) -> Result<InferenceResult, InferenceError> {
    confidence_interval_for(sample, phi, level, EstimatorKind::LyndenBell)
}

/// Confidence interval centred on either estimator. Both share the same
/// asymptotic variance.
pub fn confidence_interval_for(
    sample: &SortedSample,
    phi: &ScoreFunction,
    level: f64,
    kind: EstimatorKind,
) -> Result<InferenceResult, InferenceError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(InferenceError::InvalidLevel(level));
    }
    let est = lynden_bell(sample);
    let estimate = match kind {
        EstimatorKind::LyndenBell => lb_integral(&est, phi)?,
        EstimatorKind::Modified => modified_integral(&modified_weights(sample), phi)?,
    };
    let sigma2 = sigma2_with(sample, &est, phi)?;
    InferenceResult::from_parts(estimate, sigma2, sample.n(), level)
}
