use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("singular linear system")]
    Singular,
    #[error("problem too large: {0}")]
    TooLarge(String),
    /// A construction or certificate failed its numerical self-check.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn verify(msg: impl Into<String>) -> Self {
        Error::Verification(msg.into())
    }

    pub fn is_verification(&self) -> bool {
        matches!(self, Error::Verification(_))
    }
}
