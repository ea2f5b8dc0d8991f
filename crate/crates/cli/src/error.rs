use thiserror::Error;

/// Failures of the front end. Engine errors keep their own names.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Validation(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Engine(#[from] celeste_core::Error),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Validation(_) => "ValidationError",
            CliError::Io { .. } => "IoError",
            CliError::Engine(e) => e.name(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        CliError::Validation(message.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
