use std::fmt;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: schema, hypotheses, or arguments. Exit code 2.
    Validation(String),
    /// A result disagreed with its oracle. Exit code 3.
    Mismatch(String),
    /// Anything else. Exit code 1.
    Other(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Mismatch(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Mismatch(m) => write!(f, "oracle mismatch: {m}"),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qflow_core::Error> for CliError {
    fn from(e: qflow_core::Error) -> Self {
        use qflow_core::Error as E;
        match e {
            E::InvalidSpec(_)
            | E::InvalidArgument(_)
            | E::DimensionMismatch { .. }
            | E::IndexOutOfRange { .. }
            | E::Unsupported(_)
            | E::ImplicitStepStalled { .. } => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
