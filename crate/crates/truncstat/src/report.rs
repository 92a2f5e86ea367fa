//! JSON reports. Fields keep declaration order and floats are written in
//! shortest round-trip form, so parsing a report returns the same bits.

use serde::{Deserialize, Serialize};

use truncstat_core::estimator::{lynden_bell, modified_weights, HoleReport};
use truncstat_core::{RepresentationTerms, SortedSample};

/// Hole positions as 1-based ranks among the distinct lifetimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Holes {
    pub inner_holes: Vec<usize>,
    pub first_inner_hole: Option<usize>,
    pub zeroed_mass_points: Vec<usize>,
}

impl From<&HoleReport> for Holes {
    fn from(h: &HoleReport) -> Self {
        let rank = |v: &[usize]| v.iter().map(|i| i + 1).collect();
        Holes {
            inner_holes: rank(&h.inner_hole_indices),
            first_inner_hole: h.first_inner_hole.map(|i| i + 1),
            zeroed_mass_points: rank(&h.zeroed_mass_points),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: usize,
    pub m: usize,
    pub points: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub risk_counts: Vec<usize>,
    pub weights: Vec<f64>,
    /// `F_n` at each point.
    pub cdf: Vec<f64>,
    /// `Λ_n` at each point.
    pub hazard: Vec<f64>,
    pub modified_weights: Vec<f64>,
    pub holes: Holes,
    pub warnings: Vec<String>,
}

impl EstimateReport {
    pub fn new(sample: &SortedSample) -> Self {
        let est = lynden_bell(sample);
        let holes = Holes::from(est.holes());
        let mut warnings = Vec::new();
        if let Some(j) = holes.first_inner_hole {
            warnings.push(format!(
                "empty inner risk set at rank {j}: points to its right carry no mass"
            ));
        }
        if sample.lower_support_hint() {
            warnings.push(
                "smallest truncation value is not below smallest lifetime: \
                 lower tail may not be identifiable"
                    .to_string(),
            );
        }
        EstimateReport {
            n: sample.n(),
            m: sample.m(),
            points: est.points().to_vec(),
            multiplicities: sample.mult().to_vec(),
            risk_counts: sample.risk_counts().to_vec(),
            weights: est.weights().to_vec(),
            cdf: est.cdf().values().to_vec(),
            hazard: est.hazard().values().to_vec(),
            modified_weights: modified_weights(sample).weights().to_vec(),
            holes,
            warnings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralEntry {
    pub estimator: String,
    pub estimate: f64,
    pub sigma2: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrateReport {
    pub phi: String,
    pub n: usize,
    pub level: f64,
    pub results: Vec<IntegralEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentReport {
    pub model: String,
    pub phi: String,
    pub n: usize,
    pub lhs: f64,
    pub l1: f64,
    pub l2: f64,
    pub remainder: f64,
    pub per_obs_mean: f64,
    pub per_obs_variance: f64,
}

impl RepresentReport {
    pub fn new(model: String, phi: String, terms: &RepresentationTerms) -> Self {
        let n = terms.per_obs.len();
        let mean = terms.per_obs.iter().sum::<f64>() / n as f64;
        let var = terms
            .per_obs
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / n as f64;
        RepresentReport {
            model,
            phi,
            n,
            lhs: terms.lhs,
            l1: terms.l1,
            l2: terms.l2,
            remainder: terms.remainder,
            per_obs_mean: mean,
            per_obs_variance: var,
        }
    }
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports hold finite numbers");
    s.push('\n');
    s
}
