use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input does not match the expected file schema.
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    /// Data parsed but violates a model invariant.
    #[error("invalid {entity} `{id}`: {message}")]
    Invariant {
        entity: &'static str,
        id: String,
        message: String,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("scenario generation failed: {0}")]
    Generation(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("evaluation cap exceeded: {needed} evaluations requested, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invariant(entity: &'static str, id: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invariant {
            entity,
            id: id.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
