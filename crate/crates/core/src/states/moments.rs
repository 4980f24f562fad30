use std::io::Write;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::simpson;
use crate::trajectory::{solve_epsilon_at, EpsilonTrajectory, FrequencyProfile, TrajectorySample};

use super::operator::derivative;
use super::wavefunction::{coherent_means, WaveFunction};

/// `σx` below which a sample counts as squeezed: `1/2` less a margin that
/// absorbs solver noise on `|ε|² = 1`.
pub const SQUEEZE_THRESHOLD: f64 = 0.5 - 1e-9;

/// First and second moments. `sigma_x` and `sigma_p` are variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean_x: f64,
    pub mean_p: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub sigma_xp: f64,
    pub corr: f64,
    pub uncertainty_product: f64,
    /// `|σxσp(1 − r²) − 1/4|`.
    pub schrodinger_residual: f64,
    /// Refinement estimate of the finite-difference error in `Ψ′`
    /// (zero for closed-form moments).
    pub derivative_error: f64,
}

impl MomentSummary {
    pub fn from_moments(mean_x: f64, mean_p: f64, sigma_x: f64, sigma_p: f64, sigma_xp: f64, derivative_error: f64) -> Self {
        let corr = sigma_xp / (sigma_x * sigma_p).sqrt();
        let uncertainty_product = sigma_x * sigma_p;
        MomentSummary {
            mean_x,
            mean_p,
            sigma_x,
            sigma_p,
            sigma_xp,
            corr,
            uncertainty_product,
            schrodinger_residual: (uncertainty_product - sigma_xp * sigma_xp - 0.25).abs(),
            derivative_error,
        }
    }

    /// `σxσp − σxp² ≥ 1/4` up to `slack`.
    pub fn satisfies_robertson(&self, slack: f64) -> bool {
        self.uncertainty_product - self.sigma_xp * self.sigma_xp >= 0.25 - slack
    }
}

/// Moments of a state by grid quadrature with `p = −i d/dx`.
pub fn moments(wf: &WaveFunction) -> Result<MomentSummary> {
    let grid = wf.grid();
    let h = grid.spacing();
    let psi = wf.values();
    let dpsi = derivative(psi, h, 1);
    let dpsi_coarse = derivative(psi, h, 2);

    let quad = |f: &dyn Fn(usize, f64) -> f64| -> f64 {
        let v: Vec<C64> = grid.points().enumerate().map(|(k, x)| C64::new(f(k, x), 0.0)).collect();
        simpson(h, &v).re
    };
    let norm = quad(&|k, _| psi[k].norm_sqr());
    if !(norm > 0.0) {
        return Err(Error::NotNormalized { norm });
    }
    // Im(Ψ* Ψ′) is the momentum density
    let current = |k: usize| (psi[k].conj() * dpsi[k]).im;
    let mean_x = quad(&|k, x| x * psi[k].norm_sqr()) / norm;
    let mean_x2 = quad(&|k, x| x * x * psi[k].norm_sqr()) / norm;
    let mean_p = quad(&|k, _| current(k)) / norm;
    let mean_p2 = quad(&|k, _| dpsi[k].norm_sqr()) / norm;
    let mean_xp = quad(&|k, x| x * current(k)) / norm;

    let diff: Vec<C64> = dpsi.iter().zip(&dpsi_coarse).map(|(a, b)| C64::new((a - b).norm_sqr(), 0.0)).collect();
    let derivative_error = simpson(h, &diff).re.max(0.0).sqrt() / 15.0;

    Ok(MomentSummary::from_moments(
        mean_x,
        mean_p,
        mean_x2 - mean_x * mean_x,
        mean_p2 - mean_p * mean_p,
        mean_xp - mean_x * mean_p,
        derivative_error,
    ))
}

/// Closed-form moments of `Ψ₀`: `σx = |ε|²/2`, `σp = |ε̇|²/2`,
/// `σxp = Re(ε* ε̇)/2`.
pub fn analytic_moments(sample: &TrajectorySample) -> MomentSummary {
    MomentSummary::from_moments(
        0.0,
        0.0,
        sample.eps.norm_sqr() / 2.0,
        sample.deps.norm_sqr() / 2.0,
        (sample.eps.conj() * sample.deps).re / 2.0,
        0.0,
    )
}

/// Closed-form moments of the correlated coherent state `Ψ_α`.
pub fn analytic_moments_coherent(alpha: C64, sample: &TrajectorySample) -> MomentSummary {
    let (mean_x, mean_p) = coherent_means(alpha, sample);
    MomentSummary { mean_x, mean_p, ..analytic_moments(sample) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingPoint {
    pub t: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub corr: f64,
    pub squeezed: bool,
}

/// Closed-form variances along a trajectory; squeezed means `σx < 1/2`.
pub fn squeezing_series(traj: &EpsilonTrajectory) -> Vec<SqueezingPoint> {
    traj.samples()
        .map(|s| {
            let m = analytic_moments(&s);
            SqueezingPoint {
                t: s.t,
                sigma_x: m.sigma_x,
                sigma_p: m.sigma_p,
                corr: m.corr,
                squeezed: m.sigma_x < SQUEEZE_THRESHOLD,
            }
        })
        .collect()
}

/// Writes `t, sigma_x, sigma_p, corr, squeezed`.
pub fn write_squeezing_csv<W: Write>(series: &[SqueezingPoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,sigma_x,sigma_p,corr,squeezed")?;
    for p in series {
        writeln!(w, "{:.14e},{:.14e},{:.14e},{:.14e},{}", p.t, p.sigma_x, p.sigma_p, p.corr, p.squeezed)?;
    }
    Ok(())
}

/// Time and value of the smallest `σx` on `traj`, refined between the
/// neighbours of the best sample by golden-section search on fresh solves.
pub fn refine_min_sigma_x(profile: &FrequencyProfile, traj: &EpsilonTrajectory, tol: f64) -> Result<(f64, f64)> {
    let series = squeezing_series(traj);
    let best = series
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.sigma_x.total_cmp(&b.1.sigma_x))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let mut lo = traj.times[best.saturating_sub(1)];
    let mut hi = traj.times[(best + 1).min(traj.len() - 1)];
    let sigma_at = |t: f64| -> Result<f64> {
        let s = solve_epsilon_at(profile, &[t], tol)?;
        Ok(s.eps[0].norm_sqr() / 2.0)
    };
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (sigma_at(a)?, sigma_at(b)?);
    for _ in 0..60 {
        if hi - lo < 1e-9 {
            break;
        }
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = sigma_at(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = sigma_at(b)?;
        }
    }
    let t = 0.5 * (lo + hi);
    let v = sigma_at(t)?.min(series[best].sigma_x);
    Ok((t, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{reference_trajectory, solve_epsilon};
    use std::f64::consts::PI;

    #[test]
    fn analytic_values() {
        let m = analytic_moments(&TrajectorySample::initial());
        assert_eq!((m.sigma_x, m.sigma_p, m.sigma_xp), (0.5, 0.5, 0.0));
        let s = TrajectorySample::new(1.0, C64::new(1.0, 1.0), C64::new(0.0, 1.0)).unwrap();
        let m = analytic_moments(&s);
        assert!((m.sigma_x - 1.0).abs() < 1e-15);
        assert!((m.sigma_p - 0.5).abs() < 1e-15);
        assert!((m.sigma_xp - 0.5).abs() < 1e-15);
        assert!((m.corr - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(m.schrodinger_residual < 1e-12);
    }

    #[test]
    fn constant_frequency_never_squeezes() {
        let traj = solve_epsilon(&FrequencyProfile::constant(1.0).unwrap(), 20.0, 0.01, 1e-10).unwrap();
        assert!(squeezing_series(&traj).iter().all(|p| !p.squeezed));
    }

    #[test]
    fn free_particle_spreads() {
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.2).collect();
        let traj = reference_trajectory(&FrequencyProfile::free(), &times).unwrap();
        for p in squeezing_series(&traj) {
            assert!((p.sigma_x - (1.0 + p.t * p.t) / 2.0).abs() < 1e-12);
            assert!(!p.squeezed);
        }
    }

    #[test]
    fn step_minimum_is_one_eighth() {
        let p = FrequencyProfile::step(2.0, 0.0).unwrap();
        let traj = solve_epsilon(&p, 3.0, 0.01, 1e-11).unwrap();
        let (t, v) = refine_min_sigma_x(&p, &traj, 1e-11).unwrap();
        assert!((v - 0.125).abs() < 1e-9, "{v}");
        let k = ((t - PI / 4.0) / (PI / 2.0)).round();
        assert!((t - PI / 4.0 - k * PI / 2.0).abs() < 1e-4);
    }

    #[test]
    fn csv_layout() {
        let traj = solve_epsilon(&FrequencyProfile::free(), 1.0, 0.5, 1e-10).unwrap();
        let mut buf = Vec::new();
        write_squeezing_csv(&squeezing_series(&traj), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,sigma_x,sigma_p,corr,squeezed");
        assert!(lines[1].ends_with(",false"));
    }
}
