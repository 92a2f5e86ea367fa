//! Model-based influence function and the i.i.d. representation of
//! `√n ∫φ d(F_n - F)`. These need the true model and serve as a validation
//! instrument; the data-only counterpart is [`crate::inference`].
//!
//! For continuous `F`, `dF* = α⁻¹ G dF` and `C = α⁻¹ G (1 - F)`, hence
//!
//! * `ψ/C dF* = ψ f / (1 - F) dz`,
//! * `ψ/C² dF* = α ψ f / (G (1 - F)²) dz`.
//!
//! For `φ(x) = x` the second density reduces to `-α κ / G(z)` with `κ = 1`
//! for exponential and `κ = 1/2` for uniform lifetimes, which gives closed
//! forms; other scores fall back to adaptive quadrature.

use alloc::vec::Vec;

use crate::estimator::lynden_bell;
use crate::inference::lb_integral;
use crate::model::{Law, ModelError, TruncationModel};
use crate::quadrature::{self, ABS_TOL};
use crate::sample::SortedSample;
use crate::score::ScoreFunction;

/// Decomposition `lhs = √n (l1 - l2) + remainder`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationTerms {
    /// `√n ∫φ d(F_n - F)`.
    pub lhs: f64,
    /// `∫ ψ/C d(F_n* - F*)`.
    pub l1: f64,
    /// `∫ (C_n - C)/C² ψ dF*`.
    pub l2: f64,
    /// `lhs - √n (l1 - l2)`, the √n-scaled remainder.
    pub remainder: f64,
    /// `η_i = ψ(X_i)/C(X_i) - ∫_{(Y_i, X_i]} ψ/C² dF*`, in row order;
    /// `l1 - l2` equals their mean.
    pub per_obs: Vec<f64>,
}

fn score_at(phi: &ScoreFunction, z: f64) -> f64 {
    phi.eval(z).unwrap_or(f64::NAN)
}

/// `∫_{(y, ∞)} φ dF`.
fn upper_tail_integral(
    model: &TruncationModel,
    phi: &ScoreFunction,
    y: f64,
) -> Result<f64, ModelError> {
    let law = model.f();
    let lo = y.max(law.lower());
    if lo >= law.upper() {
        return Ok(0.0);
    }
    match (phi, *law) {
        (ScoreFunction::Identity, Law::Exponential { rate }) => {
            Ok((lo + 1.0 / rate) * libm::exp(-rate * lo))
        }
        (ScoreFunction::Identity, Law::Uniform { lo: a, hi: b }) => {
            Ok((b * b - lo * lo) / (2.0 * (b - a)))
        }
        (ScoreFunction::Indicator(t), _) => Ok((law.cdf(*t) - law.cdf(lo)).max(0.0)),
        (ScoreFunction::Constant(c), _) => Ok(c * law.survival(lo)),
        (ScoreFunction::Tabulated(_), _) => Err(ModelError::ScoreNotIntegrable(
            alloc::string::ToString::to_string(phi),
        )),
        _ => Ok(quadrature::integrate(
            |z| score_at(phi, z) * law.density(z).unwrap_or(0.0),
            lo,
            law.upper(),
            ABS_TOL,
        )?),
    }
}

/// `ψ(y) = ∫_{(y, ∞)} [φ(y) - φ(x)] F(dx)` under the true lifetime law.
pub fn psi_model(model: &TruncationModel, phi: &ScoreFunction, y: f64) -> Result<f64, ModelError> {
    if let ScoreFunction::Constant(_) = phi {
        return Ok(0.0);
    }
    let law = model.f();
    if y >= law.upper() {
        return Ok(0.0);
    }
    // closed forms that avoid cancellation between the two terms
    match (phi, *law) {
        (ScoreFunction::Identity, Law::Exponential { rate }) if y >= 0.0 => {
            return Ok(-libm::exp(-rate * y) / rate)
        }
        (ScoreFunction::Identity, Law::Uniform { lo, hi }) if y >= lo => {
            return Ok(-(hi - y) * (hi - y) / (2.0 * (hi - lo)))
        }
        _ => {}
    }
    let at_y = phi
        .eval(y)
        .map_err(|_| ModelError::ScoreNotIntegrable(alloc::string::ToString::to_string(phi)))?;
    Ok(at_y * law.survival(y) - upper_tail_integral(model, phi, y)?)
}

/// Antiderivative of `1/G` where `G > 0`.
fn inverse_g_antiderivative(g: &Law, z: f64) -> f64 {
    match *g {
        Law::Exponential { rate } => z + libm::log(-libm::expm1(-rate * z)) / rate,
        Law::Uniform { lo, hi } => {
            if z <= hi {
                (hi - lo) * libm::log(z - lo)
            } else {
                (hi - lo) * libm::log(hi - lo) + (z - hi)
            }
        }
        Law::PointMass { .. } => z,
    }
}

/// `∫ ψ/C dF*` over the whole line.
fn psi_over_c_total(model: &TruncationModel, phi: &ScoreFunction) -> Result<f64, ModelError> {
    let law = model.f();
    let lo = law.lower().max(model.a_g());
    let hi = law.upper();
    if lo >= hi || phi.is_constant() {
        return Ok(0.0);
    }
    let mut err = None;
    let v = quadrature::integrate(
        |z| {
            let s = law.survival(z);
            if s <= 0.0 {
                return 0.0;
            }
            match psi_model(model, phi, z) {
                Ok(p) => p * law.density(z).unwrap_or(0.0) / s,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        ABS_TOL,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(v?)
}

/// `∫_{(lo, hi]} ψ/C² dF*`.
pub fn psi_over_c2_integral(
    model: &TruncationModel,
    phi: &ScoreFunction,
    lo: f64,
    hi: f64,
) -> Result<f64, ModelError> {
    let law = model.f();
    let a = lo.max(law.lower()).max(model.a_g());
    let b = hi.min(law.upper());
    if a >= b || phi.is_constant() {
        return Ok(0.0);
    }
    let alpha = model.alpha();
    if let ScoreFunction::Identity = phi {
        let kappa = match law {
            Law::Exponential { .. } => 1.0,
            Law::Uniform { .. } => 0.5,
            Law::PointMass { .. } => unreachable!("lifetimes are continuous"),
        };
        let g = model.g();
        let v = -alpha * kappa * (inverse_g_antiderivative(g, b) - inverse_g_antiderivative(g, a));
        if v.is_finite() {
            return Ok(v);
        }
        return Err(ModelError::InvalidParameters(alloc::format!(
            "∫ψ/C² dF* diverges on ({lo}, {hi}]"
        )));
    }
    let mut err = None;
    let mut integrand = |z: f64| {
        let s = law.survival(z);
        let gz = model.g().cdf(z);
        if s <= 0.0 || gz <= 0.0 {
            return 0.0;
        }
        match psi_model(model, phi, z) {
            Ok(p) => alpha * p * law.density(z).unwrap_or(0.0) / (gz * s * s),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    // split at an indicator threshold where ψ jumps
    let v = match phi {
        ScoreFunction::Indicator(t) if a < *t && *t < b => {
            quadrature::integrate(&mut integrand, a, *t, ABS_TOL / 2.0)?
                + quadrature::integrate(&mut integrand, *t, b, ABS_TOL / 2.0)?
        }
        _ => quadrature::integrate(&mut integrand, a, b, ABS_TOL)?,
    };
    if let Some(e) = err {
        return Err(e);
    }
    Ok(v)
}

/// Evaluates the two leading terms of the representation, the remainder and
/// the per-observation summands for a sample drawn from `model`.
pub fn representation_terms(
    sample: &SortedSample,
    model: &TruncationModel,
    phi: &ScoreFunction,
) -> Result<RepresentationTerms, ModelError> {
    let n = sample.n();
    let root_n = libm::sqrt(n as f64);
    for (row, &x) in sample.x_values().iter().enumerate() {
        if !(model.c(x) > 0.0) {
            return Err(ModelError::ModelSampleMismatch { row, x });
        }
    }

    let est = lynden_bell(sample);
    let truth = model.mean_of(phi)?;
    let integral = lb_integral(&est, phi)
        .map_err(|_| ModelError::ScoreNotIntegrable(alloc::string::ToString::to_string(phi)))?;
    let lhs = root_n * (integral - truth);

    let centre = psi_over_c_total(model, phi)?;
    let mut ratio_sum = 0.0;
    let mut k_sum = 0.0;
    let mut per_obs = Vec::with_capacity(n);
    for (&x, &y) in sample.x_values().iter().zip(sample.y_values()) {
        let ratio = psi_model(model, phi, x)? / model.c(x);
        let k = psi_over_c2_integral(model, phi, y, x)?;
        ratio_sum += ratio;
        k_sum += k;
        per_obs.push(ratio - k);
    }
    let l1 = ratio_sum / n as f64 - centre;
    let l2 = k_sum / n as f64 - centre;
    let remainder = lhs - root_n * (l1 - l2);
    Ok(RepresentationTerms {
        lhs,
        l1,
        l2,
        remainder,
        per_obs,
    })
}
