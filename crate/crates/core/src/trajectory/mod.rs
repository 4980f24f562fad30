//! The classical mode function `ε(t)`: `ε̈ + ω²(t) ε = 0` with `ε(0) = 1`,
//! `ε̇(0) = i`, and its Wronskian `ε̇ε* − ε̇*ε = 2i`.
//!
//! Alongside `ε` and `ε̇` the solver integrates the unwrapped phase
//! `θ = arg ε` through `θ̇ = Im(ε̇ε*)/|ε|²`, starting from `θ(0) = 0`.
//! Every fractional power of `ε` downstream is taken on this branch.

mod ode;
mod profile;

use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use ode::{integrate, Tolerances};
pub use profile::FrequencyProfile;

/// Admissible solver tolerances.
pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-6;

/// The step controller targets `tol · CONTROLLER_MARGIN` so that the error
/// accumulated over `t ≲ 50` stays below the requested tolerance.
const CONTROLLER_MARGIN: f64 = 0.01;

/// Wronskian defect accepted when building a [`TrajectorySample`].
pub const SAMPLE_WRONSKIAN_TOL: f64 = 1e-8;

/// `ε` and `ε̇` at a single instant together with the tracked phase of `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub eps: C64,
    pub deps: C64,
    /// Continuous branch of `arg ε`.
    pub phase: f64,
}

impl TrajectorySample {
    /// Sample whose phase is the principal argument of `eps`.
    pub fn new(t: f64, eps: C64, deps: C64) -> Result<Self> {
        Self::with_phase(t, eps, deps, eps.arg())
    }

    pub fn with_phase(t: f64, eps: C64, deps: C64, phase: f64) -> Result<Self> {
        let residual = wronskian_defect(eps, deps);
        if !(residual < SAMPLE_WRONSKIAN_TOL) {
            return Err(Error::InvalidArgument(format!(
                "sample at t = {t} violates the Wronskian by {residual:e}"
            )));
        }
        let wrapped = C64::from_polar(1.0, phase - eps.arg());
        if (wrapped - 1.0).norm() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "phase {phase} is not a branch of arg ε = {}",
                eps.arg()
            )));
        }
        Ok(TrajectorySample { t, eps, deps, phase })
    }

    /// The initial data `ε = 1`, `ε̇ = i`.
    pub fn initial() -> Self {
        TrajectorySample { t: 0.0, eps: C64::new(1.0, 0.0), deps: C64::new(0.0, 1.0), phase: 0.0 }
    }

    /// `ε^{−1/2}` on the tracked branch.
    pub fn eps_inv_sqrt(&self) -> C64 {
        C64::from_polar(self.eps.norm().powf(-0.5), -0.5 * self.phase)
    }
}

/// `|ε̇ε* − ε̇*ε − 2i|`.
pub fn wronskian_defect(eps: C64, deps: C64) -> f64 {
    let w = deps * eps.conj() - deps.conj() * eps;
    (w - C64::new(0.0, 2.0)).norm()
}

/// Solver output on a uniform time mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonTrajectory {
    pub times: Vec<f64>,
    pub eps: Vec<C64>,
    pub deps: Vec<C64>,
    pub phase: Vec<f64>,
    pub profile: FrequencyProfile,
    pub solver_tol: f64,
}

impl EpsilonTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sample(&self, i: usize) -> TrajectorySample {
        TrajectorySample { t: self.times[i], eps: self.eps[i], deps: self.deps[i], phase: self.phase[i] }
    }

    pub fn samples(&self) -> impl Iterator<Item = TrajectorySample> + '_ {
        (0..self.len()).map(|i| self.sample(i))
    }

    /// Writes `t, re_eps, im_eps, re_deps, im_deps, wronskian_residual`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,re_eps,im_eps,re_deps,im_deps,wronskian_residual")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                self.times[i],
                self.eps[i].re,
                self.eps[i].im,
                self.deps[i].re,
                self.deps[i].im,
                wronskian_defect(self.eps[i], self.deps[i])
            )?;
        }
        Ok(())
    }
}

type State = [f64; 5];

fn pack(eps: C64, deps: C64, phase: f64) -> State {
    [eps.re, eps.im, deps.re, deps.im, phase]
}

fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::InvalidArgument(format!("solver tolerance {tol:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]")));
    }
    Ok(())
}

/// Integrates the mode equation from `(t_from, start)` and reports the
/// state at every entry of `outputs` (ordered from `t_from` towards `t_to`).
/// Step and tabulated profiles are integrated piece by piece so every
/// discontinuity of `ω²` or its slope is a mesh point.
fn propagate_to(
    profile: &FrequencyProfile,
    t_from: f64,
    start: State,
    t_to: f64,
    outputs: &[f64],
    tol: f64,
) -> Result<Vec<State>> {
    let inner = (tol * CONTROLLER_MARGIN).max(2e-14);
    let tolerances = Tolerances { rtol: inner, atol: inner };
    let dir = if t_to >= t_from { 1.0 } else { -1.0 };
    let mut edges = vec![t_from];
    edges.extend(profile.breakpoints(t_from, t_to));
    edges.push(t_to);

    let mut result = Vec::with_capacity(outputs.len());
    let mut state = start;
    let mut next = 0;
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let inside = 0.5 * (a + b);
        let first = next;
        while next < outputs.len() && (outputs[next] - b) * dir <= 0.0 {
            next += 1;
        }
        let mut seg_outputs: Vec<f64> = outputs[first..next].to_vec();
        seg_outputs.push(b);
        let rhs = |t: f64, y: &State| -> Result<State> {
            let w2 = profile.omega_sq_on_piece(t, inside)?;
            let r2 = y[0] * y[0] + y[1] * y[1];
            Ok([y[2], y[3], -w2 * y[0], -w2 * y[1], (y[3] * y[0] - y[2] * y[1]) / r2])
        };
        let mut states = integrate(rhs, a, state, b, &seg_outputs, tolerances)?;
        state = states.pop().expect("segment end is always an output");
        result.extend(states);
    }
    if next != outputs.len() {
        return Err(Error::Integration { t: t_to, reason: "output outside the integration span".into() });
    }
    Ok(result)
}

/// Output mesh `0, dt, 2dt, …` closed by `t_end`.
pub fn output_mesh(t_end: f64, dt_out: f64) -> Result<Vec<f64>> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    if !(dt_out.is_finite() && dt_out > 0.0) {
        return Err(Error::InvalidArgument(format!("dt_out must be positive, got {dt_out}")));
    }
    let n = (t_end / dt_out * (1.0 + 1e-12)).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|k| (k as f64 * dt_out).min(t_end)).collect();
    if t_end - times[n] > 1e-9 * dt_out {
        times.push(t_end);
    } else {
        times[n] = t_end;
    }
    Ok(times)
}

/// Solves for `ε(t)` on `t = 0, dt_out, …, t_end`.
pub fn solve_epsilon(profile: &FrequencyProfile, t_end: f64, dt_out: f64, tol: f64) -> Result<EpsilonTrajectory> {
    let times = output_mesh(t_end, dt_out)?;
    solve_epsilon_at(profile, &times, tol)
}

/// Solves for `ε(t)` at arbitrary nondecreasing times `≥ 0`.
pub fn solve_epsilon_at(profile: &FrequencyProfile, times: &[f64], tol: f64) -> Result<EpsilonTrajectory> {
    check_tol(tol)?;
    profile.validate()?;
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("output times must be finite, nonnegative and sorted".into()));
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    let initial = TrajectorySample::initial();
    let states = propagate_to(profile, 0.0, pack(initial.eps, initial.deps, 0.0), t_end, times, tol)?;
    let mut traj = EpsilonTrajectory {
        times: times.to_vec(),
        eps: Vec::with_capacity(states.len()),
        deps: Vec::with_capacity(states.len()),
        phase: Vec::with_capacity(states.len()),
        profile: profile.clone(),
        solver_tol: tol,
    };
    for (i, s) in states.iter().enumerate() {
        if times[i] == 0.0 {
            traj.eps.push(initial.eps);
            traj.deps.push(initial.deps);
            traj.phase.push(0.0);
        } else {
            traj.eps.push(C64::new(s[0], s[1]));
            traj.deps.push(C64::new(s[2], s[3]));
            traj.phase.push(s[4]);
        }
    }
    Ok(traj)
}

/// Carries `(ε, ε̇)` given at `t_from` to `t_to`, forwards or backwards.
pub fn propagate(
    profile: &FrequencyProfile,
    t_from: f64,
    eps: C64,
    deps: C64,
    t_to: f64,
    tol: f64,
) -> Result<(C64, C64)> {
    check_tol(tol)?;
    let s = propagate_to(profile, t_from, pack(eps, deps, eps.arg()), t_to, &[t_to], tol)?;
    Ok((C64::new(s[0][0], s[0][1]), C64::new(s[0][2], s[0][3])))
}

/// `max_i |ε̇ε* − ε̇*ε − 2i|` over the samples.
pub fn wronskian_residual(traj: &EpsilonTrajectory) -> f64 {
    traj.eps.iter().zip(&traj.deps).map(|(&e, &d)| wronskian_defect(e, d)).fold(0.0, f64::max)
}

/// Closed-form `(ε(t), ε̇(t))` for constant, free and step profiles.
pub fn reference_epsilon(profile: &FrequencyProfile, t: f64) -> Result<(C64, C64)> {
    let i = C64::new(0.0, 1.0);
    let harmonic = |e0: C64, d0: C64, w: f64, tau: f64| {
        let (s, c) = (w * tau).sin_cos();
        (e0 * c + d0 * (s / w), -e0 * (w * s) + d0 * c)
    };
    match profile {
        FrequencyProfile::Constant { omega0 } => Ok(harmonic(C64::new(1.0, 0.0), i, *omega0, t)),
        FrequencyProfile::Free => Ok((C64::new(1.0, t), i)),
        FrequencyProfile::Step { omega1, t_switch } => {
            if t < *t_switch {
                Ok(harmonic(C64::new(1.0, 0.0), i, 1.0, t))
            } else {
                let (e0, d0) = harmonic(C64::new(1.0, 0.0), i, 1.0, *t_switch);
                Ok(harmonic(e0, d0, *omega1, t - t_switch))
            }
        }
        other => Err(Error::InvalidProfile(format!("no closed form for the {} profile", other.kind()))),
    }
}

/// Trajectory built from [`reference_epsilon`] on a mesh, with the phase
/// unwrapped sample to sample.
pub fn reference_trajectory(profile: &FrequencyProfile, times: &[f64]) -> Result<EpsilonTrajectory> {
    let mut traj = EpsilonTrajectory {
        times: times.to_vec(),
        eps: Vec::new(),
        deps: Vec::new(),
        phase: Vec::new(),
        profile: profile.clone(),
        solver_tol: 0.0,
    };
    let mut prev = 0.0f64;
    for &t in times {
        let (e, d) = reference_epsilon(profile, t)?;
        let mut th = e.arg();
        th += (2.0 * std::f64::consts::PI) * ((prev - th) / (2.0 * std::f64::consts::PI)).round();
        prev = th;
        traj.eps.push(e);
        traj.deps.push(d);
        traj.phase.push(th);
    }
    Ok(traj)
}
