use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the range the operation is defined on.
    Domain(String),
    /// Exhaustive enumeration was requested for more items than allowed.
    EnumerationTooLarge { items: u64, limit: u64 },
    /// A rank sequence does not have `k * n` entries.
    LengthMismatch { expected: usize, found: usize },
    /// A series ran out of terms before its tail bound met the tolerance.
    ToleranceNotReached { terms: usize, tail_bound: f64 },
    /// Two evaluation routes of the same quantity disagree.
    RouteMismatch {
        first: f64,
        second: f64,
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerics, false for bad arguments.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ToleranceNotReached { .. } | Error::RouteMismatch { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::EnumerationTooLarge { items, limit } => write!(
                f,
                "enumeration over {items} items exceeds the limit of {limit}"
            ),
            Error::LengthMismatch { expected, found } => {
                write!(f, "rank sequence has {found} entries, expected {expected}")
            }
            Error::ToleranceNotReached { terms, tail_bound } => write!(
                f,
                "series tolerance not reached after {terms} terms (tail bound {tail_bound:e})"
            ),
            Error::RouteMismatch {
                first,
                second,
                tolerance,
            } => write!(
                f,
                "evaluation routes disagree: {first} vs {second} (tolerance {tolerance:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
