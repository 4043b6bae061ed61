use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid reward {0}: rewards must be 0 or 1")]
    InvalidReward(u8),

    #[error("protocol violation: {0}")]
    ProtocolViolation(&'static str),

    #[error("parse error at row {row}, column {column}: {message}")]
    ParseError {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("non-numeric feature value {value:?} at row {row}, column {column}")]
    NonNumericFeature {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("dataset {0} contains no rows")]
    EmptyDataset(String),

    #[error("invalid cache file: {0}")]
    InvalidCache(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no records to summarize")]
    EmptyInput,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the input data rather than the configuration.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::ParseError { .. }
                | Error::NonNumericFeature { .. }
                | Error::EmptyDataset(_)
                | Error::InvalidCache(_)
                | Error::NotPositiveDefinite { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
