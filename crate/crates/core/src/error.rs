use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{what}: requested {requested} exceeds cap {cap} (estimated cost {cost})")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
        cost: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not normalized: deviation {0:.3e}")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian: deviation {0:.3e}")]
    NotHermitian(f64),

    #[error("numerical health check failed: {0}")]
    Numerical(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
