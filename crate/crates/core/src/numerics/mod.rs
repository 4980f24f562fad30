//! Spatial grids, composite grid quadrature and adaptive Gauss–Kronrod
//! quadrature in one and two dimensions.

mod grid;
mod quadrature;

pub use grid::{integrate_grid, simpson, GridFunction, SpatialGrid};
pub use quadrature::{quad_1d, quad_nd, QuadResult};
