//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures surfaced by domain geometry, quadrature, and verification code.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An evaluation point collided with a kernel or function singularity.
    #[error("singularity: {0}")]
    Singularity(String),

    /// The truncation parameter could not be grown far enough to meet the
    /// requested tail tolerance.
    #[error("truncation failure: {0}")]
    Truncation(String),

    /// A linear-algebra kernel failed (singular solve, non-converged eigen).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Random-matrix generation could not place an operator in the domain.
    #[error("generation error: {0}")]
    Generation(String),

    /// A rational function is not admissible for the requested domain.
    #[error("validity error: {0}")]
    Validity(String),

    /// Evaluation requested too close to a pole.
    #[error("pole proximity: {0}")]
    PoleProximity(String),

    /// A ratio whose denominator vanishes identically.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// Malformed caller input (sizes, ranges, flags).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
