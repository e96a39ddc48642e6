use thiserror::Error;

use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("coordinate {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("{0} must be nonzero")]
    ZeroVector(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point is not on the sphere (gap {gap:e}, tolerance {tolerance:e})")]
    NotOnSphere { gap: f64, tolerance: f64 },

    #[error("the Fréchet derivative does not exist at this point")]
    NotFrechetDifferentiable,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("geometric tails with ratios {left} and {right} cannot be combined")]
    IncompatibleTails { left: f64, right: f64 },

    #[error("oracle did not converge within {iters} iterations (last step {last_step:e})")]
    NonConvergence {
        iters: usize,
        last_step: f64,
        last: Vector,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
