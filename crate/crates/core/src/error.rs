//! Crate-wide error type.

use core::fmt;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by the codec, channel, and protocol layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(&'static str),
    /// Two sequences that must agree in length do not.
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Too few samples to run a statistical estimate.
    InsufficientData { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::LengthMismatch {
                what,
                expected,
                got,
            } => write!(f, "length mismatch for {what}: expected {expected}, got {got}"),
            Error::InsufficientData { needed, got } => {
                write!(f, "insufficient data: needed {needed} samples, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
