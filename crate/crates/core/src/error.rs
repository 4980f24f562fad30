use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    #[error("invalid frequency profile: {0}")]
    InvalidProfile(String),

    #[error("time {t} lies outside the tabulated range [{t_min}, {t_max}]")]
    OutOfTabulatedRange { t: f64, t_min: f64, t_max: f64 },

    #[error("ODE integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid too narrow: edge magnitude {edge:e} exceeds {threshold:e} of peak")]
    GridTooNarrow { edge: f64, threshold: f64 },

    #[error("Fock truncation inadequate: tail magnitude {tail:e}")]
    TruncationTail { tail: f64 },

    #[error("not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("rho asymmetry defect {defect:e} exceeds 1e-10")]
    RhoAsymmetric { defect: f64 },

    #[error("multi-index budget exceeded: total degree {total} > {limit}")]
    DegreeBudget { total: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
