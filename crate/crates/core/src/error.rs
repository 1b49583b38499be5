//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state-law evaluation, the solvers and the drivers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Coefficient index outside `0..=N`.
    #[error("coefficient index {index} out of range (law has N = {n_trunc})")]
    IndexOutOfRange { index: usize, n_trunc: usize },

    /// Evaluation requested outside the admissible thermodynamic domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Negative input where a non-negative quantity is required.
    #[error("negative input: {0}")]
    NegativeInput(String),

    /// An iterative solver exhausted its budget.
    #[error("convergence failure in {context}: residual {residual:.3e} after {iterations} iterations")]
    ConvergenceFailure {
        context: String,
        residual: f64,
        iterations: usize,
    },

    /// A field left the physically admissible set (vacuum, NaN, lost positivity).
    #[error("non-physical state: {0}")]
    NonPhysicalState(String),

    /// Invalid run configuration.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
