use thiserror::Error;

/// Errors raised by the algebraic and numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("blade mask {mask:#b} out of range for n = {n}")]
    BladeOutOfRange { mask: u32, n: usize },

    #[error("axis {axis} out of range 1..={n}")]
    AxisOutOfRange { axis: usize, n: usize },

    #[error("unsupported dimension n = {0} (supported: 1..={max})", max = crate::clifford::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("undefined order: no non-zero coefficients in window {lo}..={hi}")]
    EmptyWindow { lo: usize, hi: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("incomplete table: missing entry for index {0:?}")]
    IncompleteTable(Vec<u32>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
