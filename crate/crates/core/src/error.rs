use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownVariable,
    Coefficient,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid polynomial ring: {0}")]
    InvalidRing(String),
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("polynomial is not weighted-homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("the ideal is the unit ideal")]
    UnitIdeal,
    #[error("degree cap too small: {0}")]
    CapTooSmall(String),
    #[error("degree {requested} lies beyond the stored cap {cap}")]
    BeyondCap { requested: usize, cap: usize },
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("requires characteristic zero: {0}")]
    Characteristic(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
