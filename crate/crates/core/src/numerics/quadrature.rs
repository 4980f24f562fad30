use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

// Kronrod 15-point abscissae (positive half, descending) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss 7-point weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

/// Value of an adaptive quadrature with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub evaluations: usize,
}

struct Interval {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> Result<C64>>(f: &mut F, a: f64, b: f64) -> Result<Interval> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    Ok(Interval { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).norm() })
}

/// Globally adaptive Gauss–Kronrod (7, 15) quadrature of a fallible integrand.
fn adaptive<F: FnMut(f64) -> Result<C64>>(mut f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let first = gk15(&mut f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut evaluations = 15;
    heap.push(first);
    while error > tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNonConvergence { estimate: value.norm(), error_bound: error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergence { estimate: value.norm(), error_bound: error });
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // recompute to shed accumulated cancellation in the running sums
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|i| i.value).sum();
            error = heap.iter().map(|i| i.error).sum();
        }
    }
    value = heap.iter().map(|i| i.value).sum();
    error = heap.iter().map(|i| i.error).sum();
    Ok(QuadResult { value, error, evaluations })
}

/// Adaptive quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn quad_1d<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    adaptive(|x| Ok(f(x)), a, b, tol)
}

/// Nested adaptive quadrature over a box in one or two dimensions.
///
/// `bounds[i]` is the integration range of coordinate `i`. In two
/// dimensions the inner integrals are solved to `tol / (4 (b₀ − a₀))` so
/// that their accumulated error stays below half the budget.
pub fn quad_nd<F: Fn(&[f64]) -> C64>(integrand: F, bounds: &[(f64, f64)], tol: f64) -> Result<QuadResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    for &(a, b) in bounds {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!("bad integration range [{a}, {b}]")));
        }
    }
    match bounds {
        [(a, b)] => quad_1d(|x| integrand(&[x]), *a, *b, tol),
        [(a0, b0), (a1, b1)] => {
            let inner_tol = tol / (4.0 * (b0 - a0));
            let mut inner_evals = 0usize;
            let mut inner_err = 0.0f64;
            let outer = adaptive(
                |x| {
                    let r = quad_1d(|y| integrand(&[x, y]), *a1, *b1, inner_tol)?;
                    inner_evals += r.evaluations;
                    inner_err = inner_err.max(r.error);
                    Ok(r.value)
                },
                *a0,
                *b0,
                0.5 * tol,
            )?;
            Ok(QuadResult {
                value: outer.value,
                error: outer.error + inner_err * (b0 - a0),
                evaluations: inner_evals,
            })
        }
        _ => Err(Error::InvalidArgument(format!(
            "quad_nd supports one or two dimensions, got {}",
            bounds.len()
        ))),
    }
}
