use thiserror::Error;

/// Errors raised by library operations.
///
/// Violations found by the verifiers (`validate_decomposition`,
/// `verify_certificate`, metric axiom scans) are returned as data, not as
/// this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("instance too large: {0}")]
    Oversize(String),

    #[error("internal invariant broken: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
