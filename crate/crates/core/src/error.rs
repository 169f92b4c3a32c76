use thiserror::Error;

/// Errors raised by model construction, linear algebra and propagation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin magnitude {0} is not a positive half-integer")]
    InvalidSpin(f64),

    #[error("magnetic quantum number {m} is not valid for spin {s}")]
    InvalidQuantumNumber { m: f64, s: f64 },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("initial state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("integrator exceeded {0} steps")]
    MaxStepsExceeded(usize),

    #[error("integrator step size underflow at t = {0:e} s")]
    StepSizeUnderflow(f64),

    #[error("norm drift {drift:e} exceeds tolerance {tolerance:e}")]
    NormDrift { drift: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
