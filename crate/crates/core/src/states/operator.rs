use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::numerics::GridFunction;
use crate::trajectory::TrajectorySample;

use super::wavefunction::{l2_norm, WaveFunction};

/// Fourth-order central difference on a uniform grid with spacing `stride·h`,
/// falling back to second order within `2·stride` of the edges.
pub(crate) fn derivative(values: &[C64], h: f64, stride: usize) -> Vec<C64> {
    let n = values.len();
    let s = stride;
    let hs = h * s as f64;
    (0..n)
        .map(|k| {
            if k >= 2 * s && k + 2 * s < n {
                (values[k - 2 * s] - 8.0 * values[k - s] + 8.0 * values[k + s] - values[k + 2 * s]) / (12.0 * hs)
            } else if k >= s && k + s < n {
                (values[k + s] - values[k - s]) / (2.0 * hs)
            } else if k < s {
                (-3.0 * values[k] + 4.0 * values[k + s] - values[k + 2 * s]) / (2.0 * hs)
            } else {
                (3.0 * values[k] - 4.0 * values[k - s] + values[k - 2 * s]) / (2.0 * hs)
            }
        })
        .collect()
}

/// `A f = (i/√2)(ε (−i d/dx) − ε̇ x) f = (εf′ − iε̇ x f)/√2` at `sample`.
pub fn apply_a_to(sample: &TrajectorySample, f: &GridFunction) -> Result<GridFunction> {
    let grid = *f.grid();
    let df = derivative(f.values(), grid.spacing(), 1);
    let i = C64::new(0.0, 1.0);
    let values = grid
        .points()
        .zip(f.values().iter().zip(&df))
        .map(|(x, (&v, &d))| FRAC_1_SQRT_2 * (sample.eps * d - i * sample.deps * x * v))
        .collect();
    GridFunction::new(grid, values)
}

/// The integral of motion `A` applied to a state at its own sample.
pub fn apply_a(wf: &WaveFunction) -> Result<GridFunction> {
    apply_a_to(&wf.sample, wf.as_grid_function())
}

/// `‖AΨ − αΨ‖₂`.
pub fn eigen_residual(wf: &WaveFunction, alpha: C64) -> Result<f64> {
    let a = apply_a(wf)?;
    Ok(l2_norm(&a.combine(C64::new(1.0, 0.0), wf.as_grid_function(), -alpha)?))
}

/// `‖A²Ψ − α²Ψ‖₂`.
pub fn eigen_residual_sq(wf: &WaveFunction, alpha: C64) -> Result<f64> {
    let a2 = apply_a_to(&wf.sample, &apply_a(wf)?)?;
    Ok(l2_norm(&a2.combine(C64::new(1.0, 0.0), wf.as_grid_function(), -alpha * alpha)?))
}

/// `⟨Ψ|A†A|Ψ⟩ = ‖AΨ‖²`.
pub fn number_expectation(wf: &WaveFunction) -> Result<f64> {
    Ok(l2_norm(&apply_a(wf)?).powi(2))
}
