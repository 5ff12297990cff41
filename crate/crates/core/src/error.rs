use thiserror::Error;

/// Errors raised when an operation's preconditions are violated.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field is in {found} representation, expected {expected}")]
    RepMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("{name} = {value} is not a dyadic number 2^j with j >= 0")]
    NotDyadic { name: &'static str, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("degenerate regression design: {0}")]
    DegenerateDesign(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
