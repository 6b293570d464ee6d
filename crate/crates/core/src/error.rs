//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live on different spaces")]
    SpaceMismatch,
    #[error("operator flagged hermitian deviates from its adjoint by {0:e}")]
    NotHermitian(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("basis is not orthonormal (max Gram deviation {0:e})")]
    NonOrthonormalBasis(f64),
    #[error("norm drifted by {0:e} during unitary evolution")]
    NormDrift(f64),
    #[error("trace drifted by {0:e} during master-equation evolution")]
    TraceDrift(f64),
    #[error("density matrix lost positivity (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("population {0:e} reached the Fock cutoff")]
    TruncationLeakage(f64),
    #[error("state leaves the code space (residual weight {0:e})")]
    OutsideCode(f64),
    #[error("inconsistent syndrome: {0}")]
    InconsistentSyndrome(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
