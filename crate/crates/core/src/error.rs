use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or configuration value violates its invariants.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    NonConvergence { tolerance: f64, estimate: f64 },

    #[error("index out of range: battery {battery}, remaining {remaining} (table horizon {horizon})")]
    OutOfRange {
        battery: usize,
        remaining: usize,
        horizon: usize,
    },

    #[error("invalid sensor state: {0}")]
    InvalidState(String),

    #[error("oracle instance too large: {0}")]
    TooLarge(String),

    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
