//! Fully specified truncation models: the lifetime law `F`, the truncation
//! law `G`, the truncation probability `α = P(Y <= X)`, the observed marginal
//! `F*` and the risk function `C`, plus rejection sampling of observed pairs.
//!
//! Built-in families:
//!
//! * `exp-exp:λ,μ`: `X ~ Exp(λ)`, `Y ~ Exp(μ)`;
//! * `uniform-uniform:a,b,c,d`: `X ~ U(a, b)`, `Y ~ U(c, d)`;
//! * `no-truncation:exp:λ` / `no-truncation:uniform:a,b`: `Y` is a point
//!   mass one unit below the lower end of the support of `X`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::quadrature::{self, QuadratureFailure};
use crate::sample::TruncatedSample;
use crate::score::ScoreFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown model family {0:?}")]
    UnknownFamily(String),
    #[error("invalid model parameters: {0}")]
    InvalidParameters(String),
    #[error("rejection sampling used {attempts} attempts without accepting a pair")]
    RejectionBudgetExceeded { attempts: u64 },
    #[error(transparent)]
    QuadratureFailure(#[from] QuadratureFailure),
    #[error("observation in row {row} (x = {x}) lies outside the model support")]
    ModelSampleMismatch { row: usize, x: f64 },
    #[error("score function {0} has no model integral")]
    ScoreNotIntegrable(String),
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::UnknownFamily(_) => "UnknownFamily",
            ModelError::InvalidParameters(_) => "InvalidParameters",
            ModelError::RejectionBudgetExceeded { .. } => "RejectionBudgetExceeded",
            ModelError::QuadratureFailure(_) => "QuadratureFailure",
            ModelError::ModelSampleMismatch { .. } => "ModelSampleMismatch",
            ModelError::ScoreNotIntegrable(_) => "ScoreNotIntegrable",
        }
    }
}

/// Upper survival level treated as the end of an unbounded support.
const TAIL_SURVIVAL: f64 = 1e-17;

/// A univariate law with closed-form distribution and quantile functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    PointMass { at: f64 },
}

impl Law {
    fn validate(&self) -> Result<(), ModelError> {
        let ok = match *self {
            Law::Exponential { rate } => rate.is_finite() && rate > 0.0,
            Law::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Law::PointMass { at } => at.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidParameters(self.to_string()))
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        match *self {
            Law::Exponential { rate } => {
                if z <= 0.0 {
                    0.0
                } else {
                    -libm::expm1(-rate * z)
                }
            }
            Law::Uniform { lo, hi } => ((z - lo) / (hi - lo)).clamp(0.0, 1.0),
            Law::PointMass { at } => {
                if z >= at {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `cdf(z-)`.
    pub fn left_limit(&self, z: f64) -> f64 {
        match *self {
            Law::PointMass { at } => {
                if z > at {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.cdf(z),
        }
    }

    /// `1 - cdf(z)`, computed without cancellation in the exponential tail.
    pub fn survival(&self, z: f64) -> f64 {
        match *self {
            Law::Exponential { rate } => {
                if z <= 0.0 {
                    1.0
                } else {
                    libm::exp(-rate * z)
                }
            }
            _ => 1.0 - self.cdf(z),
        }
    }

    /// Lebesgue density; `None` for atoms.
    pub fn density(&self, z: f64) -> Option<f64> {
        match *self {
            Law::Exponential { rate } => Some(if z < 0.0 {
                0.0
            } else {
                rate * libm::exp(-rate * z)
            }),
            Law::Uniform { lo, hi } => Some(if z < lo || z > hi {
                0.0
            } else {
                1.0 / (hi - lo)
            }),
            Law::PointMass { .. } => None,
        }
    }

    /// Left-continuous quantile function on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Law::Exponential { rate } => -libm::log1p(-u) / rate,
            Law::Uniform { lo, hi } => lo + (hi - lo) * u,
            Law::PointMass { at } => at,
        }
    }

    /// Infimum of the support.
    pub fn lower(&self) -> f64 {
        match *self {
            Law::Exponential { .. } => 0.0,
            Law::Uniform { lo, .. } => lo,
            Law::PointMass { at } => at,
        }
    }

    /// Supremum of the support, or the `1 - 1e-17` quantile when unbounded.
    pub fn upper(&self) -> f64 {
        match *self {
            Law::Exponential { rate } => -libm::log(TAIL_SURVIVAL) / rate,
            Law::Uniform { hi, .. } => hi,
            Law::PointMass { at } => at,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Law::Exponential { rate } => 1.0 / rate,
            Law::Uniform { lo, hi } => 0.5 * (lo + hi),
            Law::PointMass { at } => at,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Law::Exponential { rate } => 1.0 / (rate * rate),
            Law::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Law::PointMass { .. } => 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Law::PointMass { at } => at,
            _ => {
                let u: f64 = rng.sample(Open01);
                self.quantile(u)
            }
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Law::Exponential { rate } => write!(f, "exp({rate})"),
            Law::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            Law::PointMass { at } => write!(f, "point({at})"),
        }
    }
}

/// Named model family with parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    ExpExp { x_rate: f64, y_rate: f64 },
    UniformUniform { x: (f64, f64), y: (f64, f64) },
    NoTruncation { x: Law },
}

impl ModelSpec {
    /// The acceptance model `X ~ U(1, 2)`, `Y ~ U(0, 2)`.
    pub const UNIFORM_DEFAULT: ModelSpec = ModelSpec::UniformUniform {
        x: (1.0, 2.0),
        y: (0.0, 2.0),
    };
    pub const EXP_DEFAULT: ModelSpec = ModelSpec::ExpExp {
        x_rate: 1.0,
        y_rate: 1.0,
    };
}

fn parse_params(s: &str, expected: usize) -> Option<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .ok()?;
    (v.len() == expected).then_some(v)
}

impl FromStr for ModelSpec {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (family, rest) = match s.split_once(':') {
            Some((f, r)) => (f, Some(r)),
            None => (s, None),
        };
        let bad = || ModelError::InvalidParameters(s.to_string());
        match family {
            "exp-exp" => match rest {
                None => Ok(ModelSpec::EXP_DEFAULT),
                Some(r) => {
                    let p = parse_params(r, 2).ok_or_else(bad)?;
                    Ok(ModelSpec::ExpExp {
                        x_rate: p[0],
                        y_rate: p[1],
                    })
                }
            },
            "uniform-uniform" => match rest {
                None => Ok(ModelSpec::UNIFORM_DEFAULT),
                Some(r) => {
                    let p = parse_params(r, 4).ok_or_else(bad)?;
                    Ok(ModelSpec::UniformUniform {
                        x: (p[0], p[1]),
                        y: (p[2], p[3]),
                    })
                }
            },
            "no-truncation" => {
                let x = match rest.map(|r| r.split_once(':').unwrap_or((r, ""))) {
                    None => Law::Exponential { rate: 1.0 },
                    Some(("exp", p)) => {
                        let p = parse_params(p, 1).ok_or_else(bad)?;
                        Law::Exponential { rate: p[0] }
                    }
                    Some(("uniform", p)) => {
                        let p = parse_params(p, 2).ok_or_else(bad)?;
                        Law::Uniform { lo: p[0], hi: p[1] }
                    }
                    Some(_) => return Err(bad()),
                };
                Ok(ModelSpec::NoTruncation { x })
            }
            other => Err(ModelError::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::ExpExp { x_rate, y_rate } => write!(f, "exp-exp:{x_rate},{y_rate}"),
            ModelSpec::UniformUniform { x, y } => {
                write!(f, "uniform-uniform:{},{},{},{}", x.0, x.1, y.0, y.1)
            }
            ModelSpec::NoTruncation { x } => match x {
                Law::Exponential { rate } => write!(f, "no-truncation:exp:{rate}"),
                Law::Uniform { lo, hi } => write!(f, "no-truncation:uniform:{lo},{hi}"),
                Law::PointMass { at } => write!(f, "no-truncation:point:{at}"),
            },
        }
    }
}

/// Ground-truth truncation model. The lifetime law is always continuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationModel {
    spec: ModelSpec,
    x: Law,
    y: Law,
    alpha: f64,
}

/// Antiderivative of `G` for `Y ~ U(c, d)`.
fn uniform_cdf_integral(c: f64, d: f64, z: f64) -> f64 {
    if z <= c {
        0.0
    } else if z <= d {
        (z - c) * (z - c) / (2.0 * (d - c))
    } else {
        0.5 * (d - c) + (z - d)
    }
}

pub fn make_model(spec: ModelSpec) -> Result<TruncationModel, ModelError> {
    let (x, y, alpha) = match spec {
        ModelSpec::ExpExp { x_rate, y_rate } => {
            let (x, y) = (
                Law::Exponential { rate: x_rate },
                Law::Exponential { rate: y_rate },
            );
            x.validate()?;
            y.validate()?;
            (x, y, y_rate / (x_rate + y_rate))
        }
        ModelSpec::UniformUniform {
            x: (a, b),
            y: (c, d),
        } => {
            let (x, y) = (Law::Uniform { lo: a, hi: b }, Law::Uniform { lo: c, hi: d });
            x.validate()?;
            y.validate()?;
            let alpha = (uniform_cdf_integral(c, d, b) - uniform_cdf_integral(c, d, a)) / (b - a);
            (x, y, alpha)
        }
        ModelSpec::NoTruncation { x } => {
            if matches!(x, Law::PointMass { .. }) {
                return Err(ModelError::InvalidParameters(
                    "lifetime law must be continuous".to_string(),
                ));
            }
            x.validate()?;
            (
                x,
                Law::PointMass {
                    at: x.lower() - 1.0,
                },
                1.0,
            )
        }
    };
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ModelError::InvalidParameters(alloc::format!(
            "truncation probability {alpha} for {spec}"
        )));
    }
    Ok(TruncationModel { spec, x, y, alpha })
}

/// A sample of observed pairs with the number of raw draws it took.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub sample: TruncatedSample,
    pub attempts: u64,
}

impl TruncationModel {
    pub fn spec(&self) -> ModelSpec {
        self.spec
    }

    /// Law of the lifetime `X`.
    pub fn f(&self) -> &Law {
        &self.x
    }

    /// Law of the truncation variable `Y`.
    pub fn g(&self) -> &Law {
        &self.y
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a_f(&self) -> f64 {
        self.x.lower()
    }

    pub fn a_g(&self) -> f64 {
        self.y.lower()
    }

    /// `F*(x) = α⁻¹ ∫_{(-∞, x]} G dF`.
    pub fn fstar(&self, x: f64) -> f64 {
        let v = match self.spec {
            ModelSpec::ExpExp { x_rate, y_rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let total = x_rate + y_rate;
                    (-libm::expm1(-x_rate * x) + x_rate / total * libm::expm1(-total * x))
                        / self.alpha
                }
            }
            ModelSpec::UniformUniform {
                x: (a, b),
                y: (c, d),
            } => {
                let z = x.clamp(a, b);
                (uniform_cdf_integral(c, d, z) - uniform_cdf_integral(c, d, a))
                    / ((b - a) * self.alpha)
            }
            ModelSpec::NoTruncation { x: law } => law.cdf(x),
        };
        v.clamp(0.0, 1.0)
    }

    /// `C(z) = α⁻¹ G(z) (1 - F(z-))`.
    pub fn c(&self, z: f64) -> f64 {
        self.y.cdf(z) * (1.0 - self.x.left_limit(z)) / self.alpha
    }

    /// `a_G <= a_F` and `F{a_F} = 0`; the second part always holds because
    /// lifetimes are continuous.
    pub fn support_condition(&self) -> bool {
        self.a_g() <= self.a_f()
    }

    /// `∫ dF/G < ∞`. Every built-in continuous `G` vanishes linearly at
    /// `a_G`, so this holds exactly when `a_G < a_F`; a point mass at or
    /// below `a_F` makes `G ≡ 1` on the support of `F`.
    pub fn integrability_condition(&self) -> bool {
        match self.y {
            Law::PointMass { at } => at <= self.a_f(),
            _ => self.a_g() < self.a_f(),
        }
    }

    /// `∫φ dF`.
    pub fn mean_of(&self, phi: &ScoreFunction) -> Result<f64, ModelError> {
        match phi {
            ScoreFunction::Identity => Ok(self.x.mean()),
            ScoreFunction::Indicator(t) => Ok(self.x.cdf(*t)),
            ScoreFunction::Constant(c) => Ok(*c),
            ScoreFunction::Power(_) => {
                let density = |z: f64| self.x.density(z).unwrap_or(0.0);
                let v = quadrature::integrate(
                    |z| phi.eval(z).unwrap_or(f64::NAN) * density(z),
                    self.x.lower(),
                    self.x.upper(),
                    quadrature::ABS_TOL,
                )?;
                Ok(v)
            }
            ScoreFunction::Tabulated(_) => Err(ModelError::ScoreNotIntegrable(phi.to_string())),
        }
    }

    /// Draws `n` observed pairs by rejection: raw `(X, Y)` are drawn
    /// independently and kept when `Y <= X`. Each accepted pair may use at
    /// most `ceil(1000 / α)` raw draws.
    pub fn draw_observed<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
    ) -> Result<Draw, ModelError> {
        if n == 0 {
            return Err(ModelError::InvalidParameters(
                "n must be at least 1".to_string(),
            ));
        }
        let budget = libm::ceil(1000.0 / self.alpha) as u64;
        let mut pairs = Vec::with_capacity(n);
        let mut attempts = 0u64;
        for _ in 0..n {
            let mut tries = 0u64;
            loop {
                if tries == budget {
                    return Err(ModelError::RejectionBudgetExceeded { attempts: tries });
                }
                tries += 1;
                let x = self.x.sample(rng);
                let y = self.y.sample(rng);
                if y <= x {
                    pairs.push((x, y));
                    break;
                }
            }
            attempts += tries;
        }
        let sample = TruncatedSample::new(pairs).expect("accepted pairs satisfy y <= x");
        Ok(Draw { sample, attempts })
    }
}

/// Deterministic observed sample for a seed.
pub fn draw_observed_sample(
    model: &TruncationModel,
    n: usize,
    seed: u64,
) -> Result<TruncatedSample, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(model.draw_observed(n, &mut rng)?.sample)
}
