use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_grid, simpson, GridFunction, SpatialGrid};
use crate::trajectory::TrajectorySample;

/// Largest |α| accepted by the coherent and cat constructors.
pub const MAX_ALPHA: f64 = 6.0;
/// Largest number-state index.
pub const MAX_N: usize = 60;
/// Edge magnitude allowed relative to the peak.
pub const EDGE_DECAY: f64 = 1e-10;
/// Norm defect allowed for constructed states.
pub const NORM_TOL: f64 = 1e-6;
/// Smallest |α| for the odd cat state.
pub const MIN_ODD_ALPHA: f64 = 1e-3;

const MIN_AUTO_POINTS: usize = 2049;
const MAX_AUTO_POINTS: usize = 1 << 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// What a [`WaveFunction`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateLabel {
    Ground,
    Coherent { alpha: C64 },
    Number { n: usize },
    Cat { parity: Parity, alpha: C64 },
    QCoherent { alpha: C64, lambda: f64 },
    Synthesized,
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Ground => write!(f, "ground"),
            StateLabel::Coherent { alpha } => write!(f, "coherent_{}_{}", alpha.re, alpha.im),
            StateLabel::Number { n } => write!(f, "number_{n}"),
            StateLabel::Cat { parity: Parity::Even, alpha } => write!(f, "cat_even_{}_{}", alpha.re, alpha.im),
            StateLabel::Cat { parity: Parity::Odd, alpha } => write!(f, "cat_odd_{}_{}", alpha.re, alpha.im),
            StateLabel::QCoherent { alpha, lambda } => write!(f, "qcoherent_{}_{}_{}", alpha.re, alpha.im, lambda),
            StateLabel::Synthesized => write!(f, "synthesized"),
        }
    }
}

/// A state on a grid at one instant of the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub(crate) function: GridFunction,
    pub sample: TrajectorySample,
    pub label: StateLabel,
}

impl WaveFunction {
    /// Wraps grid values, checking edge decay and normalization.
    pub fn new(function: GridFunction, sample: TrajectorySample, label: StateLabel) -> Result<Self> {
        check_edges(function.values())?;
        let wf = WaveFunction { function, sample, label };
        let norm = wf.norm_sq();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(wf)
    }

    pub fn grid(&self) -> &SpatialGrid {
        self.function.grid()
    }

    pub fn values(&self) -> &[C64] {
        self.function.values()
    }

    pub fn as_grid_function(&self) -> &GridFunction {
        &self.function
    }

    /// `∫ |Ψ|² dx`.
    pub fn norm_sq(&self) -> f64 {
        let dens: Vec<C64> = self.values().iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
        simpson(self.grid().spacing(), &dens).re
    }

    /// `⟨self|other⟩ = ∫ self* other dx`.
    pub fn inner(&self, other: &WaveFunction) -> Result<C64> {
        inner_product(&self.function, &other.function)
    }

    /// Writes `x, re_psi, im_psi, abs2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re_psi,im_psi,abs2")?;
        for (x, v) in self.grid().points().zip(self.values()) {
            writeln!(w, "{:.14e},{:.14e},{:.14e},{:.14e}", x, v.re, v.im, v.norm_sqr())?;
        }
        Ok(())
    }
}

/// `∫ f* g dx` for functions on the same grid.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<C64> {
    if f.grid() != g.grid() {
        return Err(Error::Dimension("inner product of functions on different grids".into()));
    }
    let prod: Vec<C64> = f.values().iter().zip(g.values()).map(|(a, b)| a.conj() * b).collect();
    Ok(simpson(f.grid().spacing(), &prod))
}

/// `‖f‖₂ = (∫ |f|²)^{1/2}`.
pub fn l2_norm(f: &GridFunction) -> f64 {
    let dens = GridFunction::new(*f.grid(), f.values().iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect())
        .expect("finite by construction");
    integrate_grid(&dens).re.max(0.0).sqrt()
}

fn check_edges(values: &[C64]) -> Result<()> {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = values[0].norm().max(values[values.len() - 1].norm());
    if !(peak > 0.0) || edge > EDGE_DECAY * peak {
        return Err(Error::GridTooNarrow { edge: if peak > 0.0 { edge / peak } else { edge }, threshold: EDGE_DECAY });
    }
    Ok(())
}

/// Grid centered on `center` with half-width `half_width`, fine enough
/// that `h (|p̄| + √σp) ≤ 0.02` and `h ≤ 0.02 √σx₀`, where `σx₀ = |ε|²/2`.
pub fn auto_grid(sample: &TrajectorySample, center: f64, half_width: f64, mean_p: f64, sigma_p: f64) -> Result<SpatialGrid> {
    let sigma_x0 = sample.eps.norm_sqr() / 2.0;
    let h = (0.02 / (mean_p.abs() + sigma_p.sqrt())).min(0.02 * sigma_x0.sqrt());
    let panels = ((2.0 * half_width / h).ceil() as usize).div_ceil(2) * 2;
    let n_points = (panels + 1).clamp(MIN_AUTO_POINTS, MAX_AUTO_POINTS);
    SpatialGrid::centered(center, half_width, n_points | 1)
}

fn ground_widths(sample: &TrajectorySample) -> (f64, f64) {
    (sample.eps.norm_sqr() / 2.0, sample.deps.norm_sqr() / 2.0)
}

/// `(⟨x⟩, ⟨p⟩)` of the `A`-eigenstate with eigenvalue `α`.
pub fn coherent_means(alpha: C64, sample: &TrajectorySample) -> (f64, f64) {
    (SQRT_2 * (sample.eps.conj() * alpha).re, SQRT_2 * (sample.deps.conj() * alpha).re)
}

pub fn grid_for_ground(sample: &TrajectorySample) -> Result<SpatialGrid> {
    let (sx, sp) = ground_widths(sample);
    auto_grid(sample, 0.0, 10.0 * sx.sqrt(), 0.0, sp)
}

pub fn grid_for_coherent(alpha: C64, sample: &TrajectorySample) -> Result<SpatialGrid> {
    let (sx, sp) = ground_widths(sample);
    let (x0, p0) = coherent_means(alpha, sample);
    auto_grid(sample, x0, 10.0 * sx.sqrt(), p0, sp)
}

pub fn grid_for_number(n: usize, sample: &TrajectorySample) -> Result<SpatialGrid> {
    let (sx, sp) = ground_widths(sample);
    let k = (2 * n + 1) as f64;
    auto_grid(sample, 0.0, 10.0 * (k * sx).sqrt(), 0.0, k * sp)
}

pub fn grid_for_cat(alpha: C64, sample: &TrajectorySample) -> Result<SpatialGrid> {
    let (sx, sp) = ground_widths(sample);
    let (x0, p0) = coherent_means(alpha, sample);
    auto_grid(sample, 0.0, 10.0 * sx.sqrt() + x0.abs(), p0, sp)
}

fn log_ground(sample: &TrajectorySample, x: f64) -> C64 {
    let prefactor = C64::new(-0.25 * PI.ln() - 0.5 * sample.eps.norm().ln(), -0.5 * sample.phase);
    prefactor + C64::new(0.0, 1.0) * sample.deps * x * x / (2.0 * sample.eps)
}

fn finish(grid: &SpatialGrid, values: Vec<C64>, sample: &TrajectorySample, label: StateLabel) -> Result<WaveFunction> {
    WaveFunction::new(GridFunction::new(*grid, values)?, *sample, label)
}

/// `Ψ₀ = π^{−1/4} ε^{−1/2} exp(i ε̇ x² / 2ε)`.
pub fn ground_state(sample: &TrajectorySample, grid: &SpatialGrid) -> Result<WaveFunction> {
    let values = grid.points().map(|x| log_ground(sample, x).exp()).collect();
    finish(grid, values, sample, StateLabel::Ground)
}

fn check_alpha(alpha: C64) -> Result<()> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) || alpha.norm() > MAX_ALPHA {
        return Err(Error::InvalidArgument(format!("|α| must not exceed {MAX_ALPHA}, got {alpha}")));
    }
    Ok(())
}

/// Exponent `−|α|²/2 − α² ε*/(2ε)` shared by the coherent and cat states.
fn coherent_offset(alpha: C64, sample: &TrajectorySample) -> C64 {
    -0.5 * alpha.norm_sqr() - alpha * alpha * sample.eps.conj() / (2.0 * sample.eps)
}

/// Correlated coherent state, eigenstate of `A` with eigenvalue `α`.
pub fn coherent_state(alpha: C64, sample: &TrajectorySample, grid: &SpatialGrid) -> Result<WaveFunction> {
    check_alpha(alpha)?;
    let offset = coherent_offset(alpha, sample);
    let shift = SQRT_2 * alpha / sample.eps;
    let values = grid.points().map(|x| (log_ground(sample, x) + offset + shift * x).exp()).collect();
    finish(grid, values, sample, StateLabel::Coherent { alpha })
}

/// `Hₙ(y)/√(2ⁿ n!)` for `n = 0..=n_max`.
pub(crate) fn normalized_hermite(n_max: usize, y: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n_max == 0 {
        return;
    }
    out.push(SQRT_2 * y);
    for n in 1..n_max {
        let k = n as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * y * out[n] - (k / (k + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
}

/// Number state `Ψₙ = Ψ₀ (n!)^{−1/2} (ε*/2ε)^{n/2} Hₙ(x/|ε|)`, with the
/// power taken on the tracked branch: `(ε*/2ε)^{n/2} = 2^{−n/2} e^{−inθ}`.
pub fn number_state(n: usize, sample: &TrajectorySample, grid: &SpatialGrid) -> Result<WaveFunction> {
    if n > MAX_N {
        return Err(Error::InvalidArgument(format!("number state index {n} exceeds {MAX_N}")));
    }
    let abs_eps = sample.eps.norm();
    let branch = C64::from_polar(1.0, -(n as f64) * sample.phase);
    let mut h = Vec::with_capacity(n + 1);
    let values = grid
        .points()
        .map(|x| {
            normalized_hermite(n, x / abs_eps, &mut h);
            log_ground(sample, x).exp() * branch * h[n]
        })
        .collect();
    finish(grid, values, sample, StateLabel::Number { n })
}

/// `N_m = e^{|α|²/2} / (2 √cosh|α|²)`.
pub fn even_cat_normalization(alpha: C64) -> f64 {
    let a2 = alpha.norm_sqr();
    (0.5 * a2).exp() / (2.0 * a2.cosh().sqrt())
}

/// `N_f = e^{|α|²/2} / (2 √sinh|α|²)`.
pub fn odd_cat_normalization(alpha: C64) -> f64 {
    let a2 = alpha.norm_sqr();
    (0.5 * a2).exp() / (2.0 * a2.sinh().sqrt())
}

/// Even (cosh) or odd (sinh) coherent state, eigenstate of `A²` with
/// eigenvalue `α²`.
pub fn cat_state(parity: Parity, alpha: C64, sample: &TrajectorySample, grid: &SpatialGrid) -> Result<WaveFunction> {
    check_alpha(alpha)?;
    let norm = match parity {
        Parity::Even => even_cat_normalization(alpha),
        Parity::Odd => {
            if alpha.norm() < MIN_ODD_ALPHA {
                return Err(Error::InvalidArgument(format!(
                    "odd cat state needs |α| ≥ {MIN_ODD_ALPHA}, got {}",
                    alpha.norm()
                )));
            }
            odd_cat_normalization(alpha)
        }
    };
    let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
    let offset = coherent_offset(alpha, sample);
    let shift = SQRT_2 * alpha / sample.eps;
    // 2N Ψ₀ e^{offset} cosh|sinh(z) = N Ψ₀ (e^{offset + z} ± e^{offset − z})
    let values = grid
        .points()
        .map(|x| {
            let base = log_ground(sample, x) + offset;
            norm * ((base + shift * x).exp() + sign * (base - shift * x).exp())
        })
        .collect();
    finish(grid, values, sample, StateLabel::Cat { parity, alpha })
}
