use thiserror::Error;

/// Errors raised by the geometric, statistical and selection routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("body is unbounded: {0}")]
    Unbounded(String),

    #[error("origin is not an interior point of the body")]
    NotInterior,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("rejection acceptance rate {rate:.3e} fell below floor {floor:.3e}")]
    LowAcceptance { rate: f64, floor: f64 },

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
