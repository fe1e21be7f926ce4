use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RaaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("index {index} out of range for {len} ports")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("selection set is empty")]
    EmptySelection,

    #[error("beamformer is identically zero")]
    ZeroBeamformer,

    #[error("matrix is not positive definite")]
    SingularMatrix,

    #[error("exhaustive search needs {candidates} candidates, cap is {cap}")]
    CapExceeded { candidates: u128, cap: u128 },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, RaaError>;
