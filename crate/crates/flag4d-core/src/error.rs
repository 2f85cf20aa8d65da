//! Error type shared by all core modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by tensor ops, Gaussian math, and losses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Incompatible or malformed shapes.
    Shape(String),
    /// Numerically invalid input (NaN loss, log of non-positive, zero quaternion, ...).
    Domain(String),
    /// A size precondition failed (e.g. k-NN with n <= k).
    Size(String),
    /// An object was used in a state that does not admit the operation.
    State(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Size(m) => write!(f, "size error: {m}"),
            Error::State(m) => write!(f, "state error: {m}"),
        }
    }
}

impl core::error::Error for Error {}
