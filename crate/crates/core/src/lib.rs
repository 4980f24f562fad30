//! Exact dynamics of the parametric quantum oscillator built from its linear
//! integral of motion `A = (i/√2)(ε p − ε̇ x)`.
//!
//! Units are fixed to `ħ = m = ω(0) = 1`.

pub mod error;
pub mod mvhermite;
pub mod numerics;
pub mod qdeform;
pub mod states;
pub mod trajectory;

pub use error::{Error, Result};
