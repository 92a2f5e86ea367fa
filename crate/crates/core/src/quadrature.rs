//! Globally adaptive Gauss–Kronrod (7, 15) quadrature on finite intervals.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error(
    "quadrature on [{lo}, {hi}] stopped at estimated error {error:.3e} \
     (tolerance {tolerance:.1e}) after {intervals} intervals"
)]
pub struct QuadratureFailure {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub error: f64,
    pub tolerance: f64,
    pub intervals: usize,
}

/// Absolute tolerance used for model integrals.
pub const ABS_TOL: f64 = 1e-9;

const MAX_INTERVALS: usize = 4000;
// a few panels up front so a single Gauss/Kronrod coincidence cannot end the search
const INITIAL_PANELS: usize = 8;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        // odd Kronrod nodes coincide with the Gauss nodes
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        lo,
        hi,
        value: kronrod * half,
        error: libm::fabs((kronrod - gauss) * half),
    }
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`, bisecting the
/// panel with the largest error estimate until the total estimate is below
/// `tol`. Non-finite integrand values are reported as failures.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, QuadratureFailure> {
    if lo == hi {
        return Ok(0.0);
    }
    if hi < lo {
        return integrate(f, hi, lo, tol).map(|v| -v);
    }
    let mut heap = BinaryHeap::new();
    let width = (hi - lo) / INITIAL_PANELS as f64;
    for k in 0..INITIAL_PANELS {
        let a = lo + width * k as f64;
        let b = if k + 1 == INITIAL_PANELS {
            hi
        } else {
            a + width
        };
        heap.push(kronrod(&mut f, a, b));
    }
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    while error > tol || !total.is_finite() {
        let fail = |total: f64, error: f64, intervals: usize| QuadratureFailure {
            lo,
            hi,
            estimate: total,
            error,
            tolerance: tol,
            intervals,
        };
        if heap.len() >= MAX_INTERVALS || !total.is_finite() {
            return Err(fail(total, error, heap.len()));
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(fail(total, error, heap.len() + 1));
        }
        let left = kronrod(&mut f, worst.lo, mid);
        let right = kronrod(&mut f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // refresh the running sums occasionally to shed cancellation drift
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}
