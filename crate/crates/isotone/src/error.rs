//! Crate-wide error type.

use crate::order::Vector;

/// Errors produced by solver operations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Two operands have incompatible lengths.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A value that must be finite is NaN or infinite.
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    /// A vector or matrix with zero entries where at least one is required.
    #[error("{what} must have at least one entry")]
    Empty { what: &'static str },

    /// A quantity that must be strictly positive is not.
    #[error("{what} must be strictly positive")]
    NotPositive { what: &'static str },

    /// A nonnegative matrix was handed a negative entry.
    #[error("matrix entry ({row},{col}) = {value} is negative")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    /// An index map that is not a bijection.
    #[error("permutation map is not a bijection on 0..{n}")]
    NotAPermutation { n: usize },

    /// Interval endpoints out of order.
    #[error("interval endpoints are not ordered componentwise")]
    UnorderedInterval,

    /// A named parameter failed validation.
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// Power iteration ran out of budget before the Collatz-Wielandt
    /// bracket narrowed to the requested tolerance.
    #[error("spectral radius budget exhausted; bracket [{lower}, {upper}]")]
    SpectralBudget { lower: f64, upper: f64 },

    /// A dominant fixed point was requested but none exists.
    #[error("no positive fixed point exists (witness at step {step})")]
    NoFixedPoint { step: i64, witness: Vector },

    /// A cascade block has no positive fixed point.
    #[error("no positive fixed point in diagonal block {block} of the normal form")]
    BlockNoFixedPoint { block: usize },

    /// The iteration budget ran out before existence could be decided.
    #[error("existence undecided within the iteration budget")]
    Undecided,

    /// Operation restricted to small dimensions.
    #[error("{what} supports n <= {max}, got n = {n}")]
    UnsupportedSize { what: &'static str, n: usize, max: usize },

    /// A supplied fixed point is not one.
    #[error("supplied point {index} has residual {residual:e}, above tolerance {tol:e}")]
    ResidualTooLarge { index: usize, residual: f64, tol: f64 },

    /// Problem-file parse or validation failure.
    #[error("{0}")]
    InvalidInput(String),

    /// I/O failure, stringified.
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
