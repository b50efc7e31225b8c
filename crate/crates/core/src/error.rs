use std::fmt;

use crate::geom::ClassTag;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An instance or box was declared with dimension zero.
    ZeroDimension,
    /// A box or offset vector does not match the instance dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// A box has `lo > hi` in the given dimension.
    InvertedBounds { dim: usize },
    /// The operation needs at least one box.
    EmptyInstance,
    /// Coordinate arithmetic left the representable range.
    CoordinateOverflow,
    /// The grid oracle would enumerate more cells than the configured cap.
    OracleTooLarge { cells: u128, cap: u64 },
    /// The instance does not satisfy the class a reduction requires.
    NotInClass { required: ClassTag },
    /// A parameter is outside its documented range.
    InvalidParameter(String),
    /// A plan term violates the plan's claimed class.
    PlanIntegrity(String),
    /// A file or string could not be parsed.
    Malformed(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroDimension => write!(f, "dimension must be at least 1"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvertedBounds { dim } => {
                write!(f, "box has lo > hi in dimension {dim}")
            }
            Error::EmptyInstance => write!(f, "empty instance has no translation frame"),
            Error::CoordinateOverflow => write!(f, "coordinate arithmetic overflow"),
            Error::OracleTooLarge { cells, cap } => {
                write!(f, "oracle instance too large: {cells} cells exceed cap {cap}")
            }
            Error::NotInClass { required } => {
                write!(f, "instance is not in class {required}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::PlanIntegrity(msg) => write!(f, "plan integrity violation: {msg}"),
            Error::Malformed(msg) => write!(f, "malformed input: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
