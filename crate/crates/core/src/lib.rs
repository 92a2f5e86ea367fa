//! Product-limit estimation for left-truncated data.
//!
//! A pair `(x, y)` enters the sample only when `y <= x`. This crate computes
//! the Lynden-Bell estimator of the distribution of `x`, a modified variant
//! whose risk-set denominators carry an extra `+1`, linear functionals
//! `∫φ dF` of both, plug-in asymptotic variances and normal confidence
//! intervals, and a small set of fully specified truncation models used as
//! ground truth in Monte Carlo work.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and parallel studies live in the companion `truncstat`
//! crate.
//!
//! ```
//! use truncstat_core::{estimator, inference, sample, score::ScoreFunction};
//!
//! let sorted = sample::validate_and_sort(&[(1.0, 0.5), (2.0, 0.4), (3.0, 2.5)]).unwrap();
//! let est = estimator::lynden_bell(&sorted);
//! assert_eq!(est.weights(), &[0.5, 0.5, 0.0]);
//! let mean = inference::lb_integral(&est, &ScoreFunction::Identity).unwrap();
//! assert!((mean - 1.5).abs() < 1e-12);
//! ```

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod estimator;
pub mod inference;
pub mod model;
pub mod normal;
pub mod pseudo;
pub mod quadrature;
pub mod represent;
pub mod sample;
pub mod score;
pub mod step;

pub use estimator::{HoleReport, LBEstimate, ModifiedEstimate};
pub use inference::InferenceResult;
pub use model::{Law, ModelSpec, TruncationModel};
pub use pseudo::PseudoSample;
pub use represent::RepresentationTerms;
pub use sample::{SortedSample, TruncatedSample};
pub use score::ScoreFunction;
pub use step::StepFunction;
