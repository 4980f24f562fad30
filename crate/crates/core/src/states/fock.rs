use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{simpson, GridFunction, SpatialGrid};
use crate::trajectory::TrajectorySample;

use super::wavefunction::{auto_grid, normalized_hermite, number_state, StateLabel, WaveFunction};

pub const MIN_N_MAX: usize = 8;
pub const FOCK_NORM_TOL: f64 = 1e-8;
pub const FOCK_TAIL_TOL: f64 = 1e-10;

/// Truncated number-basis coefficients `cₙ = ⟨Ψₙ|state⟩`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockVector {
    coeffs: Vec<C64>,
}

impl FockVector {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() < MIN_N_MAX + 1 {
            return Err(Error::InvalidArgument(format!(
                "n_max must be at least {MIN_N_MAX}, got {}",
                coeffs.len() as isize - 1
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite { index: coeffs.iter().position(|c| !c.norm().is_finite()).unwrap_or(0) });
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > FOCK_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let tail = coeffs.last().unwrap().norm();
        if tail >= FOCK_TAIL_TOL {
            return Err(Error::TruncationTail { tail });
        }
        Ok(FockVector { coeffs })
    }

    pub fn basis(n: usize, n_max: usize) -> Result<Self> {
        if n >= n_max {
            return Err(Error::InvalidArgument(format!("basis index {n} must lie below n_max = {n_max}")));
        }
        let mut c = vec![C64::new(0.0, 0.0); n_max + 1];
        c[n] = C64::new(1.0, 0.0);
        Self::new(c)
    }

    /// Glauber coefficients `e^{−|α|²/2} αⁿ/√n!`.
    pub fn coherent(alpha: C64, n_max: usize) -> Result<Self> {
        let scale = (-0.5 * alpha.norm_sqr()).exp();
        Self::new(powers_over_sqrt_factorial(alpha, n_max).into_iter().map(|t| t * scale).collect())
    }

    /// Even coherent state: `cₙ = αⁿ/√(n! cosh|α|²)` for even `n`.
    pub fn even_cat(alpha: C64, n_max: usize) -> Result<Self> {
        let scale = 1.0 / alpha.norm_sqr().cosh().sqrt();
        Self::new(
            powers_over_sqrt_factorial(alpha, n_max)
                .into_iter()
                .enumerate()
                .map(|(n, t)| if n % 2 == 0 { t * scale } else { C64::new(0.0, 0.0) })
                .collect(),
        )
    }

    /// Odd coherent state: `cₙ = αⁿ/√(n! sinh|α|²)` for odd `n`.
    pub fn odd_cat(alpha: C64, n_max: usize) -> Result<Self> {
        let scale = 1.0 / alpha.norm_sqr().sinh().sqrt();
        Self::new(
            powers_over_sqrt_factorial(alpha, n_max)
                .into_iter()
                .enumerate()
                .map(|(n, t)| if n % 2 == 1 { t * scale } else { C64::new(0.0, 0.0) })
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `⟨A⟩ = Σ √(n+1) cₙ* cₙ₊₁`.
    pub fn mean_a(&self) -> C64 {
        self.coeffs.windows(2).enumerate().map(|(n, w)| ((n + 1) as f64).sqrt() * w[0].conj() * w[1]).sum()
    }

    /// `⟨A²⟩ = Σ √((n+1)(n+2)) cₙ* cₙ₊₂`.
    pub fn mean_a2(&self) -> C64 {
        self.coeffs
            .windows(3)
            .enumerate()
            .map(|(n, w)| (((n + 1) * (n + 2)) as f64).sqrt() * w[0].conj() * w[2])
            .sum()
    }

    /// `⟨A†A⟩`.
    pub fn mean_number(&self) -> f64 {
        self.coeffs.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }
}

/// `αⁿ/√n!` for `n = 0..=n_max`.
fn powers_over_sqrt_factorial(alpha: C64, n_max: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut t = C64::new(1.0, 0.0);
    out.push(t);
    for n in 1..=n_max {
        t *= alpha / (n as f64).sqrt();
        out.push(t);
    }
    out
}

/// Grid sized from the Fock-space moments of `coeffs`, using
/// `x = (ε*A + εA†)/√2` and `p = (ε̇*A + ε̇A†)/√2`.
pub fn grid_for_fock(coeffs: &FockVector, sample: &TrajectorySample) -> Result<SpatialGrid> {
    let a = coeffs.mean_a();
    let a2 = coeffs.mean_a2();
    let nbar = coeffs.mean_number();
    let quad = |z: C64| {
        let mean = SQRT_2 * (z.conj() * a).re;
        let second = (z.conj() * z.conj() * a2).re + z.norm_sqr() * (nbar + 0.5);
        (mean, (second - mean * mean).max(z.norm_sqr() / 2.0))
    };
    let (x0, sx) = quad(sample.eps);
    let (p0, sp) = quad(sample.deps);
    auto_grid(sample, x0, 10.0 * sx.sqrt() + 5.0 * sample.eps.norm(), p0, sp)
}

/// `Σₙ cₙ Ψₙ(x, t)` on `grid`.
pub fn fock_synthesize(coeffs: &FockVector, sample: &TrajectorySample, grid: &SpatialGrid) -> Result<WaveFunction> {
    let n_max = coeffs.n_max();
    if n_max > super::MAX_N {
        return Err(Error::InvalidArgument(format!("n_max {n_max} exceeds {}", super::MAX_N)));
    }
    let ground = number_state(0, sample, grid)?;
    let abs_eps = sample.eps.norm();
    let rot = C64::from_polar(1.0, -sample.phase);
    let phases: Vec<C64> = (0..=n_max).scan(C64::new(1.0, 0.0), |p, _| {
        let cur = *p;
        *p *= rot;
        Some(cur)
    })
    .collect();
    let mut h = Vec::with_capacity(n_max + 1);
    let values = grid
        .points()
        .zip(ground.values())
        .map(|(x, g)| {
            normalized_hermite(n_max, x / abs_eps, &mut h);
            let s: C64 = coeffs.coeffs().iter().zip(&phases).zip(&h).map(|((c, ph), hn)| c * ph * *hn).sum();
            g * s
        })
        .collect();
    WaveFunction::new(GridFunction::new(*grid, values)?, *sample, StateLabel::Synthesized)
}

/// `⟨Ψₙ(·, t)|Ψ⟩` for `n = 0..=n_max` at the state's own sample.
pub fn fock_project(wf: &WaveFunction, n_max: usize) -> Result<Vec<C64>> {
    if n_max > super::MAX_N {
        return Err(Error::InvalidArgument(format!("n_max {n_max} exceeds {}", super::MAX_N)));
    }
    let grid = wf.grid();
    let sample = wf.sample;
    let ground = number_state(0, &sample, grid)?;
    let abs_eps = sample.eps.norm();
    let mut h = Vec::with_capacity(n_max + 1);
    let mut integrands = vec![Vec::with_capacity(grid.n_points()); n_max + 1];
    for ((x, g), psi) in grid.points().zip(ground.values()).zip(wf.values()) {
        normalized_hermite(n_max, x / abs_eps, &mut h);
        let base = g.conj() * psi;
        for (n, row) in integrands.iter_mut().enumerate() {
            row.push(base * h[n]);
        }
    }
    // conj of e^{−inθ}
    Ok(integrands
        .iter()
        .enumerate()
        .map(|(n, row)| C64::from_polar(1.0, n as f64 * sample.phase) * simpson(grid.spacing(), row))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{cat_state, coherent_state, grid_for_cat, ground_state, Parity};

    #[test]
    fn validation() {
        assert!(FockVector::new(vec![C64::new(1.0, 0.0); 3]).is_err());
        let mut c = vec![C64::new(0.0, 0.0); 10];
        c[0] = C64::new(0.5, 0.0);
        assert!(matches!(FockVector::new(c.clone()), Err(Error::NotNormalized { .. })));
        c[0] = C64::new(0.0, 0.0);
        c[9] = C64::new(1.0, 0.0);
        assert!(matches!(FockVector::new(c), Err(Error::TruncationTail { .. })));
        assert!(FockVector::coherent(C64::new(3.0, 0.0), 10).is_err());
    }

    #[test]
    fn vacuum_synthesizes_ground() {
        let s = TrajectorySample::new(1.0, C64::new(1.0, 1.0), C64::new(0.0, 1.0)).unwrap();
        let v = FockVector::basis(0, 12).unwrap();
        let g = grid_for_fock(&v, &s).unwrap();
        let a = fock_synthesize(&v, &s, &g).unwrap();
        let b = ground_state(&s, &g).unwrap();
        let d = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(d < 1e-14);
    }

    #[test]
    fn glauber_matches_coherent() {
        let s = TrajectorySample::new(1.0, C64::new(1.0, 1.0), C64::new(0.0, 1.0)).unwrap();
        let alpha = C64::new(1.0, 0.0);
        let v = FockVector::coherent(alpha, 40).unwrap();
        let g = grid_for_fock(&v, &s).unwrap();
        let a = fock_synthesize(&v, &s, &g).unwrap();
        let b = coherent_state(alpha, &s, &g).unwrap();
        let d = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(d < 1e-7, "{d}");
    }

    #[test]
    fn cat_parity_in_projection() {
        let s = TrajectorySample::initial();
        let alpha = C64::new(1.0, 0.0);
        let wf = cat_state(Parity::Odd, alpha, &s, &grid_for_cat(alpha, &s).unwrap()).unwrap();
        let c = fock_project(&wf, 20).unwrap();
        let exact = FockVector::odd_cat(alpha, 40).unwrap();
        for (n, cn) in c.iter().enumerate() {
            if n % 2 == 0 {
                assert!(cn.norm() < 1e-10, "n = {n}: {cn}");
            } else {
                assert!((cn - exact.coeffs()[n]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn moments_of_coherent_fock_vector() {
        let alpha = C64::new(1.0, -0.5);
        let v = FockVector::coherent(alpha, 40).unwrap();
        assert!((v.mean_a() - alpha).norm() < 1e-12);
        assert!((v.mean_a2() - alpha * alpha).norm() < 1e-12);
        assert!((v.mean_number() - alpha.norm_sqr()).abs() < 1e-12);
    }
}
