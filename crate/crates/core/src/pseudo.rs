//! Tie-free pseudo-observations.
//!
//! Every lifetime can be written `X = F*⁻¹(U)` with `U` uniform on `(0, 1)`.
//! Observations tied at an atom `x` of `F*` receive distinct `u` values
//! inside the jump interval `(F*(x-), F*(x)]`, and truncation values become
//! `F*(Y-)`. The Lynden-Bell estimator of the pseudo-sample then reproduces
//! the original one: the first tied `u` sees the original risk count and
//! every further tied `u` sees one fewer.

use alloc::vec::Vec;

use rand::distr::Open01;
use rand::Rng;
use thiserror::Error;

use crate::model::TruncationModel;
use crate::sample::SortedSample;
use crate::score::{ScoreError, ScoreFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PseudoError {
    #[error("F* has no jump at {x} but {mult} observations are tied there")]
    OracleInconsistent { x: f64, mult: usize },
    #[error("F* is not non-decreasing near {x}")]
    NotMonotone { x: f64 },
}

impl PseudoError {
    pub fn code(&self) -> &'static str {
        match self {
            PseudoError::OracleInconsistent { .. } => "OracleInconsistent",
            PseudoError::NotMonotone { .. } => "NotMonotone",
        }
    }
}

/// Distribution function of the observed lifetimes, with left limits.
pub trait FstarOracle {
    fn fstar(&self, x: f64) -> f64;
    fn fstar_left(&self, x: f64) -> f64;
}

impl FstarOracle for TruncationModel {
    fn fstar(&self, x: f64) -> f64 {
        TruncationModel::fstar(self, x)
    }

    fn fstar_left(&self, x: f64) -> f64 {
        // lifetimes are continuous in every built-in model
        TruncationModel::fstar(self, x)
    }
}

/// Purely atomic `F*` given by `(point, probability)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFstar {
    points: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteFstar {
    /// Atoms are sorted by point; probabilities are used as given.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|&(_, p)| {
                acc += p;
                acc
            })
            .collect();
        DiscreteFstar {
            points: atoms.into_iter().map(|a| a.0).collect(),
            cumulative,
        }
    }

    fn at(&self, count: usize) -> f64 {
        if count == 0 {
            0.0
        } else {
            self.cumulative[count - 1]
        }
    }
}

impl FstarOracle for DiscreteFstar {
    fn fstar(&self, x: f64) -> f64 {
        self.at(self.points.partition_point(|&p| p <= x))
    }

    fn fstar_left(&self, x: f64) -> f64 {
        self.at(self.points.partition_point(|&p| p < x))
    }
}

/// Continuous `F*` from a closure.
#[derive(Debug, Clone, Copy)]
pub struct ContinuousFstar<F>(pub F);

impl<F: Fn(f64) -> f64> FstarOracle for ContinuousFstar<F> {
    fn fstar(&self, x: f64) -> f64 {
        (self.0)(x)
    }

    fn fstar_left(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Placement of tied observations inside a jump interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePlacement {
    /// Sorted i.i.d. uniform draws on the open interval.
    #[default]
    Random,
    /// Midpoints of `d` equal sub-intervals.
    EvenlySpaced,
}

/// Pseudo-observations `(U_i, F*(Y_i-))`, indexed by original row.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSample {
    u: Vec<f64>,
    t: Vec<f64>,
    lifetime: Vec<f64>,
    /// Rows ordered by increasing `u`.
    order: Vec<usize>,
}

/// Builds pseudo-observations. Tied rows are assigned increasing `u` in
/// original row order; continuous points (zero-width interval, single
/// observation) receive `u = F*(x)`.
pub fn build_pseudo_sample<O, R>(
    sample: &SortedSample,
    fstar: &O,
    placement: TiePlacement,
    rng: &mut R,
) -> Result<PseudoSample, PseudoError>
where
    O: FstarOracle + ?Sized,
    R: Rng + ?Sized,
{
    let n = sample.n();
    let mut u = alloc::vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    let mut last = f64::NEG_INFINITY;
    for (i, &x) in sample.distinct_x().iter().enumerate() {
        let d = sample.mult()[i];
        let (lo, hi) = (fstar.fstar_left(x), fstar.fstar(x));
        if !(hi >= lo) || lo < last {
            return Err(PseudoError::NotMonotone { x });
        }
        let values: Vec<f64> = if hi == lo {
            if d > 1 {
                return Err(PseudoError::OracleInconsistent { x, mult: d });
            }
            alloc::vec![hi]
        } else {
            let mut fractions: Vec<f64> = match placement {
                TiePlacement::EvenlySpaced => (0..d).map(|k| (k as f64 + 0.5) / d as f64).collect(),
                TiePlacement::Random => loop {
                    let mut v: Vec<f64> = (0..d).map(|_| rng.sample(Open01)).collect();
                    v.sort_by(f64::total_cmp);
                    if v.windows(2).all(|w| w[0] < w[1]) {
                        break v;
                    }
                },
            };
            for f in fractions.iter_mut() {
                *f = lo + (hi - lo) * *f;
            }
            fractions
        };
        for (&row, &value) in sample.rows_at(i).iter().zip(&values) {
            if value <= last {
                return Err(PseudoError::NotMonotone { x });
            }
            last = value;
            u[row] = value;
            order.push(row);
        }
    }
    let t = sample
        .y_values()
        .iter()
        .map(|&y| fstar.fstar_left(y))
        .collect();
    Ok(PseudoSample {
        u,
        t,
        lifetime: sample.x_values().to_vec(),
        order,
    })
}

impl PseudoSample {
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    /// Original lifetime `F*⁻¹(U_i)` of each row.
    pub fn lifetimes(&self) -> &[f64] {
        &self.lifetime
    }

    /// Rows in increasing order of `u`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `n C_n^U(z) = #{i : t_i <= z <= u_i}`.
    pub fn risk_count(&self, z: f64) -> usize {
        self.u
            .iter()
            .zip(&self.t)
            .filter(|(&u, &t)| t <= z && z <= u)
            .count()
    }

    /// Pseudo-pairs `(u_i, t_i)` in row order; always satisfy `t <= u`.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.u.iter().copied().zip(self.t.iter().copied()).collect()
    }

    /// Per row (in `u` order), `(1 - F_n^U(U-)) / (n C_n^U(U))`, with
    /// `F_n^U` the tie-free product limit over the pseudo-sample.
    pub fn weight_ratios(&self) -> Vec<(usize, f64)> {
        let mut survival = 1.0;
        self.order
            .iter()
            .map(|&row| {
                let r = self.risk_count(self.u[row]) as f64;
                let ratio = survival / r;
                survival *= (r - 1.0) / r;
                (row, ratio)
            })
            .collect()
    }

    /// `∫ φ∘F*⁻¹ dF_n^U`.
    pub fn integral(&self, phi: &ScoreFunction) -> Result<f64, ScoreError> {
        self.weight_ratios()
            .into_iter()
            .map(|(row, ratio)| Ok(phi.eval(self.lifetime[row])? * ratio))
            .sum()
    }
}
