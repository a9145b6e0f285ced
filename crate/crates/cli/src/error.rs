use fidest_core::Error as CoreError;
use std::fmt;

/// CLI failure, each variant tied to a process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Cap(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Cap(m) => write!(f, "cap exceeded: {m}"),
            CliError::Numerical(m) => write!(f, "numerical health check failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            CoreError::NotNormalized(_) | CoreError::NotHermitian(_) | CoreError::Numerical(_) => {
                CliError::Numerical(e.to_string())
            }
            CoreError::Dimension { .. } | CoreError::InvalidArgument(_) | CoreError::Serialization(_) => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

/// Cap check performed during validation, before any computation.
pub(crate) fn cap(what: &str, requested: usize, limit: usize) -> CliResult<()> {
    if requested > limit {
        return Err(CliError::Cap(format!("{what}: requested {requested}, limit {limit}")));
    }
    Ok(())
}
