//! Empirical risk function, the Lynden-Bell estimator, the modified
//! estimator with `+1` denominators, the cumulative hazard plug-in and
//! detection of empty inner risk sets.
//!
//! Throughout, `d_i` is the multiplicity of the distinct point `X_i` and
//! `r_i = n·C_n(X_i)` its risk count, so `F_n*{X_i}/C_n(X_i) = d_i / r_i`.
//! Because the pair carrying `X_i` always covers `X_i`, `r_i >= d_i >= 1`.

use alloc::vec::Vec;

use thiserror::Error;

use crate::sample::SortedSample;
use crate::step::StepFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("sample contains tied lifetimes")]
    TiesPresent,
}

impl EstimatorError {
    pub fn code(&self) -> &'static str {
        match self {
            EstimatorError::TiesPresent => "TiesPresent",
        }
    }
}

/// Running product of factors in `[0, 1]`, summed in log space until a
/// factor is exactly zero, after which it stays exactly zero.
#[derive(Debug, Clone, Copy)]
struct LogProduct {
    log: f64,
    zero: bool,
}

impl LogProduct {
    fn one() -> Self {
        LogProduct {
            log: 0.0,
            zero: false,
        }
    }

    /// Multiplies by `1 - num/den`, `0 <= num <= den`, `den > 0`.
    fn times_one_minus(&mut self, num: f64, den: f64) {
        if self.zero {
            return;
        }
        if num >= den {
            self.zero = true;
        } else {
            self.log += libm::log1p(-num / den);
        }
    }

    fn value(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            libm::exp(self.log)
        }
    }
}

/// Empirical risk function `C_n(z) = n⁻¹ #{i : Y_i <= z <= X_i}`.
pub fn c_n(sample: &SortedSample, z: f64) -> f64 {
    sample.risk_count(z) as f64 / sample.n() as f64
}

/// Right-continuous empirical distribution function of the lifetimes.
pub fn fstar_n(sample: &SortedSample, x: f64) -> f64 {
    sample.count_at_or_below(x) as f64 / sample.n() as f64
}

/// Mass `d_i / n` of `F_n*` at `x`; zero off the sample points.
pub fn fstar_mass(sample: &SortedSample, x: f64) -> f64 {
    match sample.index_of(x) {
        Some(i) => sample.mult()[i] as f64 / sample.n() as f64,
        None => 0.0,
    }
}

/// Empty inner risk sets: distinct points `X_j`, `j < m - 1` (0-based), that
/// no other pair covers, i.e. `r_j = d_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleReport {
    pub inner_hole_indices: Vec<usize>,
    pub first_inner_hole: Option<usize>,
    /// Indices strictly right of the first inner hole; all carry zero
    /// Lynden-Bell mass.
    pub zeroed_mass_points: Vec<usize>,
}

impl HoleReport {
    pub fn is_empty(&self) -> bool {
        self.inner_hole_indices.is_empty()
    }
}

pub fn detect_holes(sample: &SortedSample) -> HoleReport {
    let m = sample.m();
    let inner_hole_indices: Vec<usize> = (0..m.saturating_sub(1))
        .filter(|&j| sample.risk_counts()[j] == sample.mult()[j])
        .collect();
    let first_inner_hole = inner_hole_indices.first().copied();
    let zeroed_mass_points = match first_inner_hole {
        Some(j) => (j + 1..m).collect(),
        None => Vec::new(),
    };
    HoleReport {
        inner_hole_indices,
        first_inner_hole,
        zeroed_mass_points,
    }
}

/// Lynden-Bell estimate: weights, distribution function, cumulative hazard
/// and hole diagnostics on the distinct sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct LBEstimate {
    points: Vec<f64>,
    weights: Vec<f64>,
    cdf: StepFunction,
    hazard: StepFunction,
    holes: HoleReport,
}

impl LBEstimate {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `W_i = F_n{X_i}`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `F_n` as a right-continuous step function (zero below the sample).
    pub fn cdf(&self) -> &StepFunction {
        &self.cdf
    }

    /// `Λ_n` as a right-continuous step function.
    pub fn hazard(&self) -> &StepFunction {
        &self.hazard
    }

    pub fn holes(&self) -> &HoleReport {
        &self.holes
    }

    pub fn total_mass(&self) -> f64 {
        self.cdf.values().last().copied().unwrap_or(0.0)
    }
}

/// Product-limit estimator `1 - F_n(x) = Π_{X_i <= x} (1 - d_i / r_i)`,
/// with weights `W_i = (1 - F_n(X_{i-1})) d_i / r_i`.
pub fn lynden_bell(sample: &SortedSample) -> LBEstimate {
    let m = sample.m();
    let d = sample.mult();
    let r = sample.risk_counts();

    let mut survival = LogProduct::one();
    let mut weights = Vec::with_capacity(m);
    let mut cdf = Vec::with_capacity(m);
    let mut hazard = Vec::with_capacity(m);
    let mut total = 0.0;
    let mut cum_hazard = 0.0;
    for i in 0..m {
        let (di, ri) = (d[i] as f64, r[i] as f64);
        let w = survival.value() * di / ri;
        survival.times_one_minus(di, ri);
        total += w;
        cum_hazard += di / ri;
        weights.push(w);
        cdf.push(total);
        hazard.push(cum_hazard);
    }

    let points = sample.distinct_x().to_vec();
    LBEstimate {
        cdf: StepFunction::new(points.clone(), cdf, 0.0),
        hazard: StepFunction::new(points.clone(), hazard, 0.0),
        points,
        weights,
        holes: detect_holes(sample),
    }
}

/// Weights of the modified estimator. Total mass may exceed one, so this is
/// only meaningful through integrals, never as a distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedEstimate {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl ModifiedEstimate {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `Ŵ_i = (d_i / r_i) Π_{j<i} (1 - d_j / (r_j + 1))`. Every factor is
/// strictly positive, so mass passes empty inner risk sets.
pub fn modified_weights(sample: &SortedSample) -> ModifiedEstimate {
    let d = sample.mult();
    let r = sample.risk_counts();
    let mut prod = LogProduct::one();
    let weights = d
        .iter()
        .zip(r)
        .map(|(&di, &ri)| {
            let w = prod.value() * di as f64 / ri as f64;
            prod.times_one_minus(di as f64, ri as f64 + 1.0);
            w
        })
        .collect();
    ModifiedEstimate {
        points: sample.distinct_x().to_vec(),
        weights,
    }
}

/// `γ_n(x) = exp{ Σ_{X_j < x} ln(1 - 1/(n C_n(X_j) + 1)) }` for tie-free
/// samples.
pub fn gamma_n(sample: &SortedSample, x: f64) -> Result<f64, EstimatorError> {
    if sample.has_ties() {
        return Err(EstimatorError::TiesPresent);
    }
    let below = sample.distinct_x().partition_point(|&v| v < x);
    let log_sum: f64 = sample.risk_counts()[..below]
        .iter()
        .map(|&r| libm::log(1.0 - 1.0 / (r as f64 + 1.0)))
        .sum();
    Ok(libm::exp(log_sum))
}

/// `Λ_n(x) = Σ_{X_i <= x} F_n*{X_i} / C_n(X_i)`.
pub fn cumulative_hazard(sample: &SortedSample, x: f64) -> f64 {
    let upto = sample.distinct_x().partition_point(|&v| v <= x);
    sample.mult()[..upto]
        .iter()
        .zip(&sample.risk_counts()[..upto])
        .map(|(&d, &r)| d as f64 / r as f64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::validate_and_sort;
    use alloc::vec;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn three_row() -> SortedSample {
        validate_and_sort(&[(1.0, 0.5), (2.0, 0.4), (3.0, 2.5)]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn risk_and_ecdf_values() {
        let s = three_row();
        assert!((c_n(&s, 1.0) - 2.0 / 3.0).abs() < TOL);
        assert!((c_n(&s, 1.5) - 1.0 / 3.0).abs() < TOL);
        assert_eq!(c_n(&s, 0.0), 0.0);
        assert!((fstar_n(&s, 2.0) - 2.0 / 3.0).abs() < TOL);
        assert_eq!(fstar_n(&s, 0.5), 0.0);
        let tied = validate_and_sort(&[(2.0, 1.0), (2.0, 0.0), (5.0, 2.0)]).unwrap();
        assert!((fstar_mass(&tied, 2.0) - 2.0 / 3.0).abs() < TOL);
        assert_eq!(fstar_mass(&tied, 3.0), 0.0);
    }

    #[test]
    fn lynden_bell_three_row() {
        let est = lynden_bell(&three_row());
        assert!(close(est.weights(), &[0.5, 0.5, 0.0], TOL));
        assert!(close(est.cdf().values(), &[0.5, 1.0, 1.0], TOL));
        assert_eq!(est.holes().inner_hole_indices, vec![1]);
        assert_eq!(est.holes().zeroed_mass_points, vec![2]);
    }

    #[test]
    fn lynden_bell_telescopes_to_ecdf() {
        let s = validate_and_sort(&[(1.0, 0.5), (2.0, 0.4), (3.0, 0.1)]).unwrap();
        assert_eq!(s.risk_counts(), &[3, 2, 1]);
        let est = lynden_bell(&s);
        assert!(close(est.weights(), &[1.0 / 3.0; 3], TOL));
        assert!(detect_holes(&s).is_empty());
    }

    #[test]
    fn modified_weights_examples() {
        let m = modified_weights(&three_row());
        assert!(close(m.weights(), &[0.5, 2.0 / 3.0, 1.0 / 3.0], TOL));
        assert!((m.total_mass() - 1.5).abs() < TOL);

        let single = validate_and_sort(&[(4.0, 1.0)]).unwrap();
        assert!(close(modified_weights(&single).weights(), &[1.0], TOL));
    }

    #[test]
    fn modified_weights_without_truncation() {
        let n = 7usize;
        let raw: Vec<(f64, f64)> = (0..n).map(|i| (i as f64 + 1.0, -1.0)).collect();
        let s = validate_and_sort(&raw).unwrap();
        let w = modified_weights(&s);
        // closed form after substituting r_j = n - j + 1 (1-based j)
        for i in 1..=n {
            let mut expect = 1.0 / (n - i + 1) as f64;
            for j in 1..i {
                expect *= (n - j + 1) as f64 / (n - j + 2) as f64;
            }
            assert!((w.weights()[i - 1] - expect).abs() < TOL);
            assert!(w.weights()[i - 1] > 0.0);
        }
    }

    #[test]
    fn gamma_examples() {
        let s = three_row();
        assert_eq!(gamma_n(&s, 1.0).unwrap(), 1.0);
        assert_eq!(gamma_n(&s, 0.0).unwrap(), 1.0);
        assert!((gamma_n(&s, 2.0).unwrap() - 2.0 / 3.0).abs() < TOL);
        assert!((gamma_n(&s, 3.0).unwrap() - 1.0 / 3.0).abs() < TOL);
        let tied = validate_and_sort(&[(2.0, 1.0), (2.0, 0.0)]).unwrap();
        assert_eq!(gamma_n(&tied, 3.0), Err(EstimatorError::TiesPresent));
    }

    #[test]
    fn hazard_examples() {
        let s = three_row();
        assert!((cumulative_hazard(&s, 1.0) - 0.5).abs() < TOL);
        assert!((cumulative_hazard(&s, 3.0) - 2.5).abs() < TOL);
        assert_eq!(cumulative_hazard(&s, 0.9), 0.0);
        let est = lynden_bell(&s);
        assert!((est.hazard().eval(3.0) - 2.5).abs() < TOL);
        assert!((est.hazard().left_limit(3.0) - 1.5).abs() < TOL);
    }

    #[test]
    fn single_observation_has_no_inner_holes() {
        let s = validate_and_sort(&[(2.0, 2.0)]).unwrap();
        let h = detect_holes(&s);
        assert!(h.is_empty());
        assert_eq!(h.first_inner_hole, None);
        assert_eq!(lynden_bell(&s).weights(), &[1.0]);
    }

    fn tied_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0u8..10, 0u8..10), 1..40).prop_map(|v| {
            v.into_iter()
                .map(|(a, b)| {
                    if b > a {
                        (b as f64, a as f64)
                    } else {
                        (a as f64, b as f64)
                    }
                })
                .collect()
        })
    }

    fn tie_free_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..40).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (u, t))| {
                    // distinct lifetimes by construction
                    let x = i as f64 + u;
                    (x, x - t * 6.0)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn weights_are_self_consistent(raw in tied_strategy()) {
            let s = validate_and_sort(&raw).unwrap();
            let est = lynden_bell(&s);
            let n = s.n() as f64;
            let mut prev = 0.0;
            for i in 0..s.m() {
                let w = est.weights()[i];
                prop_assert!(w >= 0.0);
                let fstar = s.mult()[i] as f64 / n;
                let c = c_n(&s, s.distinct_x()[i]);
                prop_assert!((w - (1.0 - prev) * fstar / c).abs() <= TOL);
                prop_assert!((est.cdf().values()[i] - prev - w).abs() <= TOL);
                prev = est.cdf().values()[i];
            }
            let sum: f64 = est.weights().iter().sum();
            prop_assert!(sum <= 1.0 + TOL);
            prop_assert!((est.total_mass() - sum).abs() <= TOL);
            prop_assert!(est.cdf().values().windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn product_limit_matches_direct_product(raw in tied_strategy()) {
            let s = validate_and_sort(&raw).unwrap();
            let est = lynden_bell(&s);
            let mut surv = 1.0;
            for i in 0..s.m() {
                surv *= 1.0 - s.mult()[i] as f64 / s.risk_counts()[i] as f64;
                prop_assert!((1.0 - est.cdf().values()[i] - surv).abs() <= TOL);
            }
        }

        #[test]
        fn tie_free_product_uses_unit_decrements(raw in tie_free_strategy()) {
            let s = validate_and_sort(&raw).unwrap();
            prop_assert!(!s.has_ties());
            let est = lynden_bell(&s);
            for (k, &x) in s.distinct_x().iter().enumerate() {
                let mut surv = 1.0;
                for &(xi, _) in &raw {
                    if xi <= x {
                        let r = raw.iter().filter(|(a, b)| *b <= xi && xi <= *a).count() as f64;
                        surv *= (r - 1.0) / r;
                    }
                }
                prop_assert!((1.0 - est.cdf().values()[k] - surv).abs() <= TOL);
            }
        }

        #[test]
        fn holes_zero_out_mass_on_the_right(raw in tied_strategy()) {
            let s = validate_and_sort(&raw).unwrap();
            let est = lynden_bell(&s);
            let h = est.holes();
            for &j in &h.inner_hole_indices {
                prop_assert!(j + 1 < s.m());
                prop_assert_eq!(s.risk_counts()[j], s.mult()[j]);
            }
            for &k in &h.zeroed_mass_points {
                prop_assert_eq!(est.weights()[k], 0.0);
            }
        }

        #[test]
        fn modified_matches_gamma_form(raw in tie_free_strategy()) {
            let s = validate_and_sort(&raw).unwrap();
            let modified = modified_weights(&s);
            for (i, &x) in s.distinct_x().iter().enumerate() {
                let via_gamma = gamma_n(&s, x).unwrap() / s.risk_counts()[i] as f64;
                prop_assert!((modified.weights()[i] - via_gamma).abs() <= TOL);
            }
        }

        #[test]
        fn no_truncation_gives_ecdf_and_harmonic_hazard(xs in prop::collection::vec(0.0f64..10.0, 1..50)) {
            let raw: Vec<(f64, f64)> = xs.iter().map(|&x| (x, -1.0)).collect();
            let s = validate_and_sort(&raw).unwrap();
            let est = lynden_bell(&s);
            let n = xs.len() as f64;
            let mut sorted = xs.clone();
            sorted.sort_by(f64::total_cmp);
            for &x in &sorted {
                let ecdf = sorted.iter().filter(|&&v| v <= x).count() as f64 / n;
                prop_assert!((est.cdf().eval(x) - ecdf).abs() <= TOL);
                let below = sorted.iter().filter(|&&v| v <= x).count();
                let harmonic: f64 = (1..=below).map(|i| 1.0 / (n - i as f64 + 1.0)).sum();
                if !s.has_ties() {
                    prop_assert!((cumulative_hazard(&s, x) - harmonic).abs() <= TOL);
                }
            }
        }

        #[test]
        fn adding_a_pair_never_lowers_risk_counts(raw in tied_strategy(), extra in (0u8..10, 0u8..10)) {
            let s = validate_and_sort(&raw).unwrap();
            let (a, b) = extra;
            let pair = if b > a { (b as f64, a as f64) } else { (a as f64, b as f64) };
            let mut more = raw.clone();
            more.push(pair);
            let t = validate_and_sort(&more).unwrap();
            for &x in s.distinct_x() {
                prop_assert!(t.risk_count(x) >= s.risk_count(x));
            }
        }
    }
}
