use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Invalid {
        origin: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] gridmatch_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Machine-readable kind, used in JSON error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Invalid { .. } => "invalid_record",
            Error::Core(gridmatch_core::Error::BudgetExceeded { .. }) => "budget_exceeded",
            Error::Core(_) => "invalid_input",
            Error::Usage(_) => "usage",
        }
    }
}
