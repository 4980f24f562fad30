//! Exact states of the parametric oscillator on a spatial grid: the ground
//! state `Ψ₀`, correlated coherent states, number states and the even/odd
//! coherent (cat) states, plus Fock-space synthesis, moments, and the
//! operator `A` for eigen-residual checks.

mod fock;
mod moments;
mod operator;
mod wavefunction;

pub use crate::trajectory::TrajectorySample;
pub use fock::{fock_project, fock_synthesize, grid_for_fock, FockVector, FOCK_NORM_TOL, FOCK_TAIL_TOL, MIN_N_MAX};
pub use moments::{
    analytic_moments, analytic_moments_coherent, moments, refine_min_sigma_x, squeezing_series, write_squeezing_csv,
    MomentSummary, SqueezingPoint, SQUEEZE_THRESHOLD,
};
pub use operator::{apply_a, apply_a_to, eigen_residual, eigen_residual_sq, number_expectation};
pub use wavefunction::{
    auto_grid, cat_state, coherent_means, coherent_state, even_cat_normalization, grid_for_cat, grid_for_coherent,
    grid_for_ground, grid_for_number, ground_state, inner_product, l2_norm, number_state, odd_cat_normalization,
    Parity, StateLabel, WaveFunction, EDGE_DECAY, MAX_ALPHA, MAX_N, MIN_ODD_ALPHA, NORM_TOL,
};
