use alloc::string::String;
use alloc::vec::Vec;

/// Failure modes shared by every module of the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("not a unit: leading coefficient is not invertible")]
    NotAUnit,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid equation: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
    #[error("implicit step stalled at residual valuation {valuation}")]
    ImplicitStepStalled { valuation: usize },
    #[error("division by q-1 is not exact")]
    InexactDivision,
    #[error("truncation order exhausted")]
    OrderExhausted,
    #[error("not enough usable points: need {needed}, have {have}")]
    TooFewPoints { needed: usize, have: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;
