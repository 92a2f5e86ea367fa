//! Monte Carlo studies over a truncation model.
//!
//! Replication `r` of cell `c` under seed `s` draws from a ChaCha8 generator
//! keyed by `s` on stream `(c << 32) | r`. Replications may run on any number
//! of threads; their results are gathered in replication order and reduced
//! serially, so every report is bit-identical at any parallelism level.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use truncstat_core::estimator::{lynden_bell, modified_weights};
use truncstat_core::inference::{
    confidence_interval_for, lb_integral, modified_integral, EstimatorKind,
};
use truncstat_core::represent::representation_terms;
use truncstat_core::{ScoreFunction, TruncationModel};

use crate::error::{ConfigError, Error};

/// Generator for one replication.
pub fn replication_rng(seed: u64, cell: u32, rep: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(cell) << 32) | u64::from(rep));
    rng
}

/// How replications are scheduled. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Threads(usize),
}

impl Execution {
    /// `TRUNCSTAT_THREADS` if set to a positive integer, otherwise the
    /// machine's available parallelism.
    pub fn from_env() -> Self {
        let threads = std::env::var("TRUNCSTAT_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            });
        if threads == 1 {
            Execution::Serial
        } else {
            Execution::Threads(threads)
        }
    }

    fn run<T, F>(self, reps: u32, f: F) -> Result<Vec<T>, Error>
    where
        T: Send,
        F: Fn(u32) -> Result<T, Error> + Sync,
    {
        let results: Vec<Result<T, Error>> = match self {
            Execution::Serial | Execution::Threads(0 | 1) => (0..reps).map(&f).collect(),
            Execution::Threads(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| ConfigError::InvalidArgument(e.to_string()))?;
                pool.install(|| (0..reps).into_par_iter().map(&f).collect())
            }
        };
        // first failure in replication order, whatever thread hit it
        results.into_iter().collect()
    }
}

/// Per-cell records of a study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport<C> {
    pub cells: Vec<C>,
}

impl<C: Serialize> StudyReport<C> {
    /// CSV table with one row per cell, header first.
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for cell in &self.cells {
            wtr.serialize(cell)
                .expect("cells serialize to flat records");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory writer")).expect("utf-8 csv")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseCell {
    pub n: usize,
    pub estimator: &'static str,
    pub reps: u32,
    pub mse: f64,
    pub mc_se: f64,
    pub bias: f64,
    pub variance: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageCell {
    pub n: usize,
    pub estimator: &'static str,
    pub reps: u32,
    pub level: f64,
    pub coverage: f64,
    pub mc_se: f64,
    /// Mean of the plug-in `σ̂²` over replications.
    pub mean_sigma2: f64,
    /// Replication variance of `√n (estimate - truth)`.
    pub mc_variance: f64,
    pub mean_width: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderCell {
    pub n: usize,
    pub reps: u32,
    pub median_abs: f64,
    pub q90_abs: f64,
    pub mean_abs: f64,
    pub seed: u64,
}

fn check_reps(reps: u32) -> Result<(), Error> {
    if reps == 0 {
        return Err(ConfigError::InvalidArgument("reps must be at least 1".into()).into());
    }
    Ok(())
}

fn warn_if_outside_theory(model: &TruncationModel) {
    if !model.support_condition() {
        log::warn!(
            "{}: a_G > a_F, F is not identifiable from truncated data",
            model.spec()
        );
    }
    if !model.integrability_condition() {
        log::warn!(
            "{}: ∫dF/G diverges, the normal limit need not hold",
            model.spec()
        );
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Sample-quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mse_cell(n: usize, kind: EstimatorKind, errors: &[f64], seed: u64) -> MseCell {
    let reps = errors.len();
    let squares: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let mse = mean(&squares);
    let mc_se = if reps > 1 {
        let s2 = squares.iter().map(|s| (s - mse) * (s - mse)).sum::<f64>() / (reps - 1) as f64;
        (s2 / reps as f64).sqrt()
    } else {
        0.0
    };
    MseCell {
        n,
        estimator: kind.name(),
        reps: reps as u32,
        mse,
        mc_se,
        bias: mean(errors),
        variance: population_variance(errors),
        seed,
    }
}

/// Mean squared error of `∫φ dF_n` and `∫φ dF̂_n` against `∫φ dF`, one
/// cell per sample size and estimator.
pub fn mse_study(
    model: &TruncationModel,
    phi: &ScoreFunction,
    n_list: &[usize],
    reps: u32,
    seed: u64,
    exec: Execution,
) -> Result<StudyReport<MseCell>, Error> {
    check_reps(reps)?;
    let truth = model.mean_of(phi)?;
    let mut cells = Vec::with_capacity(2 * n_list.len());
    for (cell, &n) in n_list.iter().enumerate() {
        let errors = exec.run(reps, |rep| {
            let mut rng = replication_rng(seed, cell as u32, rep);
            let sample = model.draw_observed(n, &mut rng)?.sample.sorted();
            let lb = lb_integral(&lynden_bell(&sample), phi)?;
            let modified = modified_integral(&modified_weights(&sample), phi)?;
            Ok((lb - truth, modified - truth))
        })?;
        let (lb, modified): (Vec<f64>, Vec<f64>) = errors.into_iter().unzip();
        cells.push(mse_cell(n, EstimatorKind::LyndenBell, &lb, seed));
        cells.push(mse_cell(n, EstimatorKind::Modified, &modified, seed));
    }
    Ok(StudyReport { cells })
}

/// Frequency with which the plug-in normal interval covers `∫φ dF`.
pub fn coverage_study(
    model: &TruncationModel,
    phi: &ScoreFunction,
    n_list: &[usize],
    reps: u32,
    level: f64,
    kind: EstimatorKind,
    seed: u64,
    exec: Execution,
) -> Result<StudyReport<CoverageCell>, Error> {
    check_reps(reps)?;
    warn_if_outside_theory(model);
    let truth = model.mean_of(phi)?;
    let mut cells = Vec::with_capacity(n_list.len());
    for (cell, &n) in n_list.iter().enumerate() {
        let results = exec.run(reps, |rep| {
            let mut rng = replication_rng(seed, cell as u32, rep);
            let sample = model.draw_observed(n, &mut rng)?.sample.sorted();
            Ok(confidence_interval_for(&sample, phi, level, kind)?)
        })?;
        let hits = results.iter().filter(|r| r.covers(truth)).count();
        let coverage = hits as f64 / reps as f64;
        let sigma2: Vec<f64> = results.iter().map(|r| r.sigma2).collect();
        let widths: Vec<f64> = results.iter().map(|r| r.width()).collect();
        let scaled: Vec<f64> = results
            .iter()
            .map(|r| (n as f64).sqrt() * (r.estimate - truth))
            .collect();
        cells.push(CoverageCell {
            n,
            estimator: kind.name(),
            reps,
            level,
            coverage,
            mc_se: (coverage * (1.0 - coverage) / reps as f64).sqrt(),
            mean_sigma2: mean(&sigma2),
            mc_variance: population_variance(&scaled),
            mean_width: mean(&widths),
            seed,
        });
    }
    Ok(StudyReport { cells })
}

/// Size of the √n-scaled remainder of the i.i.d. representation.
pub fn remainder_decay_study(
    model: &TruncationModel,
    phi: &ScoreFunction,
    n_list: &[usize],
    reps: u32,
    seed: u64,
    exec: Execution,
) -> Result<StudyReport<RemainderCell>, Error> {
    check_reps(reps)?;
    warn_if_outside_theory(model);
    let mut cells = Vec::with_capacity(n_list.len());
    for (cell, &n) in n_list.iter().enumerate() {
        let mut abs = exec.run(reps, |rep| {
            let mut rng = replication_rng(seed, cell as u32, rep);
            let sample = model.draw_observed(n, &mut rng)?.sample.sorted();
            Ok(representation_terms(&sample, model, phi)?.remainder.abs())
        })?;
        let mean_abs = mean(&abs);
        abs.sort_by(f64::total_cmp);
        cells.push(RemainderCell {
            n,
            reps,
            median_abs: quantile(&abs, 0.5),
            q90_abs: quantile(&abs, 0.9),
            mean_abs,
            seed,
        });
    }
    Ok(StudyReport { cells })
}
