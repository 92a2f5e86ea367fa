use alloc::vec::Vec;

/// Right-continuous step function with jumps at strictly increasing knots.
///
/// `eval(z)` is the value at the largest knot `<= z`, or `base` below the
/// first knot. `left_limit(z)` is the value at the largest knot `< z`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
    base: f64,
}

impl StepFunction {
    /// Panics if lengths differ or knots are not strictly increasing.
    pub fn new(knots: Vec<f64>, values: Vec<f64>, base: f64) -> Self {
        assert_eq!(knots.len(), values.len(), "knots/values length mismatch");
        assert!(
            knots.windows(2).all(|w| w[0] < w[1]),
            "knots must be strictly increasing"
        );
        StepFunction {
            knots,
            values,
            base,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self.knots.partition_point(|&k| k <= z) {
            0 => self.base,
            i => self.values[i - 1],
        }
    }

    pub fn left_limit(&self, z: f64) -> f64 {
        match self.knots.partition_point(|&k| k < z) {
            0 => self.base,
            i => self.values[i - 1],
        }
    }

    /// Size of the jump at `z`; zero away from the knots.
    pub fn jump(&self, z: f64) -> f64 {
        self.eval(z) - self.left_limit(z)
    }
}
