use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("label column {0:?} not found in header")]
    MissingLabelColumn(String),
    #[error("no rows remain after dropping rows with missing values")]
    EmptyData,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid anchors: {0}")]
    InvalidAnchors(String),
    #[error("k = {k} must be smaller than the point count n = {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("labels required: {0}")]
    MissingLabels(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
