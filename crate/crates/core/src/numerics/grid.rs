use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `x_k = x_min + k h`, `k = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl TryFrom<RawGrid> for SpatialGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        SpatialGrid::new(raw.x_min, raw.x_max, raw.n_points)
    }
}

impl From<SpatialGrid> for RawGrid {
    fn from(g: SpatialGrid) -> Self {
        RawGrid { x_min: g.x_min, x_max: g.x_max, n_points: g.n_points }
    }
}

impl SpatialGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!("x_min = {x_min} must be below x_max = {x_max}")));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} is below the minimum {}",
                Self::MIN_POINTS
            )));
        }
        Ok(SpatialGrid { x_min, x_max, n_points })
    }

    /// Grid symmetric about `center`.
    pub fn centered(center: f64, half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.spacing()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n_points).map(move |k| self.x_min + k as f64 * h)
    }

    /// Same bounds, twice the number of panels.
    pub fn refined(&self) -> Self {
        SpatialGrid { n_points: 2 * self.n_points - 1, ..*self }
    }
}

/// Complex samples on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: SpatialGrid,
    values: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: SpatialGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Dimension(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F: FnMut(f64) -> C64>(grid: SpatialGrid, f: F) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// `a·self + b·other`; both must live on the same grid.
    pub fn combine(&self, a: C64, other: &GridFunction, b: C64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Dimension("grid functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&u, &v)| a * u + b * v).collect();
        Self::new(self.grid, values)
    }
}

/// Composite Simpson rule over uniformly spaced samples.
///
/// With an odd number of panels the last panel is integrated by the
/// end-corrected trapezoid `h/2 (f₂+f₃) + h/24 (f₀ − 5f₁ + 7f₂ − 3f₃)`,
/// which, like Simpson, is exact for cubics.
pub fn simpson(h: f64, f: &[C64]) -> C64 {
    let n = f.len();
    assert!(n >= 4, "simpson needs at least four samples");
    let panels = n - 1;
    let even_panels = panels - panels % 2;
    let mut odd = C64::new(0.0, 0.0);
    let mut even = C64::new(0.0, 0.0);
    for k in 1..even_panels {
        if k % 2 == 1 {
            odd += f[k];
        } else {
            even += f[k];
        }
    }
    let mut total = (f[0] + f[even_panels] + 4.0 * odd + 2.0 * even) * (h / 3.0);
    if panels % 2 == 1 {
        let (f0, f1, f2, f3) = (f[n - 4], f[n - 3], f[n - 2], f[n - 1]);
        total += (f2 + f3) * (h / 2.0) + (f0 - 5.0 * f1 + 7.0 * f2 - 3.0 * f3) * (h / 24.0);
    }
    total
}

/// ∫ f dx over the grid by composite Simpson.
pub fn integrate_grid(f: &GridFunction) -> C64 {
    simpson(f.grid.spacing(), &f.values)
}
