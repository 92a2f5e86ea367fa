//! Observed truncated pairs and their canonical sorted form.

use alloc::vec::Vec;

use thiserror::Error;

/// Rejections raised while validating raw pairs. Row indices are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("sample is empty")]
    EmptySample,
    #[error("non-finite value in row {0}")]
    NonFinite(usize),
    #[error("truncation value exceeds lifetime (y > x) in rows {0:?}")]
    TruncationViolated(Vec<usize>),
}

impl SampleError {
    pub fn code(&self) -> &'static str {
        match self {
            SampleError::EmptySample => "EmptySample",
            SampleError::NonFinite(_) => "NonFinite",
            SampleError::TruncationViolated(_) => "TruncationViolated",
        }
    }
}

/// Validated observed pairs `(x, y)` with `y <= x`, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSample {
    pairs: Vec<(f64, f64)>,
}

impl TruncatedSample {
    /// Checks every row. All rows with `y > x` are reported together.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self, SampleError> {
        if pairs.is_empty() {
            return Err(SampleError::EmptySample);
        }
        if let Some(row) = pairs
            .iter()
            .position(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(SampleError::NonFinite(row));
        }
        let violated: Vec<usize> = pairs
            .iter()
            .enumerate()
            .filter(|(_, (x, y))| y > x)
            .map(|(i, _)| i)
            .collect();
        if !violated.is_empty() {
            return Err(SampleError::TruncationViolated(violated));
        }
        Ok(TruncatedSample { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sorted(&self) -> SortedSample {
        SortedSample::from_validated(&self.pairs)
    }
}

/// Distinct order statistics of the lifetimes together with multiplicities,
/// the row permutation, and risk-set counts at every distinct point.
///
/// Distinct point `i` (0-based) owns rows `perm[start[i]..start[i + 1]]`,
/// listed by increasing original row index.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    distinct_x: Vec<f64>,
    mult: Vec<usize>,
    perm: Vec<usize>,
    start: Vec<usize>,
    x_values: Vec<f64>,
    y_values: Vec<f64>,
    sorted_x: Vec<f64>,
    sorted_y: Vec<f64>,
    risk: Vec<usize>,
}

/// Validates raw pairs and returns them in canonical sorted form.
pub fn validate_and_sort(raw: &[(f64, f64)]) -> Result<SortedSample, SampleError> {
    Ok(TruncatedSample::new(raw.to_vec())?.sorted())
}

impl SortedSample {
    fn from_validated(pairs: &[(f64, f64)]) -> Self {
        let n = pairs.len();
        let x_values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y_values: Vec<f64> = pairs.iter().map(|p| p.1).collect();

        let mut perm: Vec<usize> = (0..n).collect();
        // stable sort keeps ties in row order
        perm.sort_by(|&a, &b| x_values[a].total_cmp(&x_values[b]));

        let mut distinct_x = Vec::new();
        let mut mult = Vec::new();
        let mut start = Vec::new();
        for (slot, &row) in perm.iter().enumerate() {
            let x = x_values[row];
            if distinct_x.last() != Some(&x) {
                distinct_x.push(x);
                mult.push(0);
                start.push(slot);
            }
            *mult.last_mut().unwrap() += 1;
        }
        start.push(n);

        let sorted_x: Vec<f64> = perm.iter().map(|&r| x_values[r]).collect();
        let mut sorted_y = y_values.clone();
        sorted_y.sort_by(f64::total_cmp);

        let mut sample = SortedSample {
            distinct_x,
            mult,
            perm,
            start,
            x_values,
            y_values,
            sorted_x,
            sorted_y,
            risk: Vec::new(),
        };
        sample.risk = sample
            .distinct_x
            .iter()
            .map(|&z| sample.risk_count(z))
            .collect();
        sample
    }

    /// Number of observations `n`.
    pub fn n(&self) -> usize {
        self.x_values.len()
    }

    /// Number of distinct lifetimes `m`.
    pub fn m(&self) -> usize {
        self.distinct_x.len()
    }

    pub fn distinct_x(&self) -> &[f64] {
        &self.distinct_x
    }

    pub fn mult(&self) -> &[usize] {
        &self.mult
    }

    /// Original rows in sorted order (by `x`, then by row index).
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Original rows carrying distinct point `i`, in row order.
    pub fn rows_at(&self, i: usize) -> &[usize] {
        &self.perm[self.start[i]..self.start[i + 1]]
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x_values
    }

    pub fn y_values(&self) -> &[f64] {
        &self.y_values
    }

    /// `n·C_n` at each distinct point.
    pub fn risk_counts(&self) -> &[usize] {
        &self.risk
    }

    /// `#{i : y_i <= z <= x_i}`.
    ///
    /// Every `y_i > z` comes with `x_i >= y_i > z`, so the count is
    /// `#{x_i >= z} - #{y_i > z}`.
    pub fn risk_count(&self, z: f64) -> usize {
        let n = self.n();
        let x_ge = n - self.sorted_x.partition_point(|&x| x < z);
        let y_gt = n - self.sorted_y.partition_point(|&y| y <= z);
        x_ge - y_gt
    }

    /// `#{i : x_i <= x}`.
    pub fn count_at_or_below(&self, x: f64) -> usize {
        self.sorted_x.partition_point(|&v| v <= x)
    }

    /// Index of `x` among the distinct points, if it is one.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.distinct_x
            .binary_search_by(|probe| probe.total_cmp(&x))
            .ok()
    }

    pub fn has_ties(&self) -> bool {
        self.m() < self.n()
    }

    /// True when the smallest truncation value reaches the smallest lifetime,
    /// an empirical hint that the lower support of the truncation law may not
    /// lie below that of the lifetime law.
    pub fn lower_support_hint(&self) -> bool {
        self.sorted_y[0] >= self.sorted_x[0]
    }

    /// Pairs in original row order.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.x_values
            .iter()
            .copied()
            .zip(self.y_values.iter().copied())
            .collect()
    }
}
