//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite {what} at coordinate {index} (value {value}) for input with norm {input_norm:.6e}")]
    NonFiniteOutput {
        what: &'static str,
        index: usize,
        value: f64,
        input_norm: f64,
    },

    #[error("non-finite entry in {what} at coordinate {index}")]
    NonFiniteInput { what: &'static str, index: usize },

    #[error("invalid problem constant: {0}")]
    InvalidConstant(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("solver needs mu > 0; use the non-strong solver for mu = 0")]
    NeedsStrongCurvature,

    #[error("no iteration budget: supply an iteration count, or a target accuracy together with {missing}")]
    MissingBudget { missing: &'static str },

    #[error("declared reference point is not a minimizer: sample has value {sample_value:.6e} below reference {reference_value:.6e}")]
    NotAMinimizer {
        sample_value: f64,
        reference_value: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
