use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at {location}")]
    NonFinite { location: String },

    #[error("column {column} has zero variance")]
    ZeroVariance { column: usize },

    #[error("active Gram matrix is rank deficient at LARS step {step} (active columns {active:?})")]
    RankDeficient { step: usize, active: Vec<usize> },

    #[error("selected columns are linearly dependent: {dependent:?}")]
    DependentColumns { dependent: Vec<usize> },

    #[error("support of size {size} exceeds the number of observations {n}")]
    SupportTooLarge { size: usize, n: usize },

    #[error("path never reaches {requested} active variables (largest support {attainable})")]
    BudgetUnreachable { requested: usize, attainable: usize },

    #[error("regularization path truncated above lambda1 = {requested} (last breakpoint {reached})")]
    PathTruncated { requested: f64, reached: f64 },

    #[error("brute-force enumeration supports at most 12 predictors, got {p}")]
    TooManyPredictors { p: usize },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
