use thiserror::Error;

pub type Result<T> = std::result::Result<T, CircError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The stated order disagrees with the number of entries supplied.
    #[error("structural error: order {expected} but {found} entries")]
    Structural { expected: usize, found: usize },

    /// The request exceeds a cost guard.
    #[error("refused: {0}")]
    Refused(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A constructed object failed its own verification.
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CircError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CircError::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        CircError::Parse {
            line,
            message: msg.into(),
        }
    }
}
