use thiserror::Error;

/// Errors raised by the design library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates a documented range or consistency constraint.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("phase profile has {got} entries, geometry expects {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unknown {kind} `{name}` (valid: {valid})")]
    Unknown {
        kind: &'static str,
        name: String,
        valid: String,
    },

    #[error("csv output failed: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
