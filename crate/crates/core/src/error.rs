use alloc::string::String;
use core::fmt;

/// Errors produced by the numerical core.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// An argument is outside its valid domain.
    Argument(String),
    /// Operand shapes are incompatible.
    Shape(String),
    /// Non-finite values or a factorization breakdown.
    Numeric(String),
    /// A statistic is undefined for the given input.
    Domain(String),
    /// The problem exceeds a configured resource cap.
    Resource(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::Numeric(msg) => write!(f, "numerical failure: {msg}"),
            Error::Domain(msg) => write!(f, "undefined: {msg}"),
            Error::Resource(msg) => write!(f, "resource limit: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
