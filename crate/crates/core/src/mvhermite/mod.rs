//! Multivariable Hermite polynomials and closed-form Gaussian overlaps.
//!
//! `H_n^{R}` is fixed by the generating function
//! `exp(−½aRa + aRx) = Σₙ H_n^{R}(x) aⁿ/n!`, so `R = 2` in one dimension gives
//! the physicists' polynomials. The overlap
//!
//! ```text
//! ∫ H_n^{R}(x) H_m^{r}(Λx + d) exp(−xMx + cx) dᴺx
//!     = π^{N/2}/√det M · exp(¼cM⁻¹c) · H^{ρ}_{(n,m)}(y)
//! ```
//!
//! uses the `2N×2N` matrix `ρ` with blocks `R − ½RM⁻¹R`, `r − ½rΛM⁻¹Λᵀr`
//! and `−½rΛM⁻¹R`.

mod franck_condon;
mod hermite;
mod overlap;
mod types;

pub use franck_condon::{franck_condon, grid_for_franck_condon, FranckCondon, MAX_FC_INDEX};
pub use hermite::{mv_hermite, mv_hermite_shifted};
pub use overlap::{
    assemble_kernel, discrepancy_row, evaluate_overlap, gaussian_overlap, gaussian_overlap_with, overlap_oracle,
    relative_error, DiscrepancyReport, DiscrepancyRow, OverlapEvaluation, RhoKernel, YConvention, ORACLE_DEGREE_BUDGET,
    ORACLE_MAX_DIM, RHO_SYMMETRY_TOL,
};
pub use types::{MultiIndex, OverlapSpec, SymmetricMatrix, DEGREE_BUDGET, SYMMETRY_TOL};
