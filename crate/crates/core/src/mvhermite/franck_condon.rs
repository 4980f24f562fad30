use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{simpson, SpatialGrid};
use crate::states::{auto_grid, number_state, MAX_N};
use crate::trajectory::TrajectorySample;

use super::hermite::hermite_with_budget;
use super::overlap::{kernel_parts, YConvention};

pub const MAX_FC_INDEX: usize = 10;

/// `⟨Ψₙ(·, 0)|Ψₘ(·, t)⟩` by grid quadrature and by the closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FranckCondon {
    pub n: usize,
    pub m: usize,
    pub t: f64,
    /// Grid quadrature of the two wavefunctions.
    pub direct: C64,
    /// Closed form with complex Gaussian weight, when available.
    pub closed_form: Option<C64>,
    pub reduction_failure: Option<String>,
    pub abs_diff: Option<f64>,
}

/// Grid symmetric about `0` wide and fine enough for both `Ψₙ(·, 0)` and
/// `Ψₘ(·, t)`.
pub fn grid_for_franck_condon(n: usize, m: usize, sample: &TrajectorySample) -> Result<SpatialGrid> {
    let init = TrajectorySample::initial();
    let kn = (2 * n + 1) as f64;
    let km = (2 * m + 1) as f64;
    let half_n = 10.0 * (kn * 0.5).sqrt();
    let half_m = 10.0 * (km * sample.eps.norm_sqr() / 2.0).sqrt();
    let half = half_n.max(half_m);
    let a = auto_grid(&init, 0.0, half, 0.0, kn * 0.5)?;
    let b = auto_grid(sample, 0.0, half, 0.0, km * sample.deps.norm_sqr() / 2.0)?;
    let coarse = if a.spacing() <= b.spacing() { a } else { b };
    Ok(coarse)
}

/// Amplitude between the `t = 0` number basis and the number basis at
/// `sample`.
///
/// The product `Ψₙ(x, 0)* Ψₘ(x, t)` is `C Hₙ(x) Hₘ(x/|ε|) exp(−μx²)` with
/// complex `μ = ½ − iε̇/(2ε)`, `Re μ = ½ + 1/(2|ε|²)`, which is the overlap
/// integral with `R = r = 2`, `Λ = 1/|ε|`, `c = d = 0` and complex `M = μ`.
pub fn franck_condon(n: usize, m: usize, sample: &TrajectorySample, grid: &SpatialGrid) -> Result<FranckCondon> {
    if n > MAX_FC_INDEX || m > MAX_FC_INDEX {
        return Err(Error::InvalidArgument(format!("indices must not exceed {MAX_FC_INDEX}, got ({n}, {m})")));
    }
    const { assert!(MAX_FC_INDEX <= MAX_N) };
    let bra = number_state(n, &TrajectorySample::initial(), grid)?;
    let ket = number_state(m, sample, grid)?;
    let integrand: Vec<C64> = bra.values().iter().zip(ket.values()).map(|(a, b)| a.conj() * b).collect();
    let direct = simpson(grid.spacing(), &integrand);

    let (closed_form, reduction_failure) = match closed_form(n, m, sample) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(FranckCondon { n, m, t: sample.t, direct, closed_form, reduction_failure, abs_diff: closed_form.map(|v| (v - direct).norm()) })
}

fn closed_form(n: usize, m: usize, sample: &TrajectorySample) -> Result<C64> {
    let abs_eps = sample.eps.norm();
    let mu = 0.5 - C64::new(0.0, 1.0) * sample.deps / (2.0 * sample.eps);
    if !(mu.re > 0.0) {
        return Err(Error::NotPositiveDefinite(format!("Re μ = {} at t = {}", mu.re, sample.t)));
    }
    let scalar = |v: C64| DMatrix::from_element(1, 1, v);
    let two = C64::new(2.0, 0.0);
    let zero = DVector::from_element(1, C64::new(0.0, 0.0));
    let parts = kernel_parts(
        &scalar(two),
        &scalar(two),
        &scalar(C64::new(1.0 / abs_eps, 0.0)),
        &scalar(mu),
        &zero,
        &zero,
        YConvention::Resolved,
    )?;
    let h = hermite_with_budget(&parts.rho, &[n, m], parts.rhs.as_slice(), 2 * MAX_FC_INDEX)?;
    let log_norm = -0.5 * PI.ln()
        - 0.5 * (n as f64 * 2f64.ln() + ln_factorial(n))
        - 0.5 * abs_eps.ln()
        - 0.5 * (ln_factorial(m) + m as f64 * 2f64.ln());
    let phase = -(0.5 + m as f64) * sample.phase;
    Ok(C64::from_polar(log_norm.exp(), phase) * parts.prefactor * h)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}
