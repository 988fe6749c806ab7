use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input value.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// Two inputs disagree on a shared contract (norm, dimension across files, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Every norm in the domain is zero, so the bound has no scale.
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },

    /// A persisted model is missing fields or carries an unknown version.
    #[error("model format v{version}: {message}")]
    ModelFormat { version: u32, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Process exit code for the CLI: 2 input/parse, 3 dimension/contract,
    /// 4 metric undefined.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_)
            | Error::Parse { .. }
            | Error::ModelFormat { .. }
            | Error::Io { .. }
            | Error::Json(_) => 2,
            Error::Dimension { .. } | Error::Contract(_) | Error::DegenerateDomain(_) => 3,
            Error::MetricUndefined(_) => 4,
        }
    }
}
