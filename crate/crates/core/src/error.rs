use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by [`ErrorClass`] so callers (the CLI, the C ABI)
/// can map them onto stable exit or status codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: no points found")]
    EmptyInput,
    #[error("line {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {row}, field {field}: cannot parse {text:?} as a number")]
    NonNumeric {
        row: usize,
        field: usize,
        text: String,
    },
    #[error("line {row}, field {field}: coordinate is not finite")]
    NonFinite { row: usize, field: usize },
    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "simplex budget of {budget} exceeded while building dimension {dim}; \
         lower the threshold or max-dim, or raise the budget"
    )]
    BudgetExceeded { budget: usize, dim: usize },
    #[error("barcode file line {line}: {message}")]
    MalformedBarcode { line: usize, message: String },
    #[error("degenerate barcode: {0}")]
    DegenerateBarcode(String),
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown report format {0:?} (expected table, csv or json)")]
    UnknownFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure classes with stable numeric codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Io,
    Budget,
    Degenerate,
}

impl ErrorClass {
    /// Process exit code for this class.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 2,
            ErrorClass::Io => 3,
            ErrorClass::Budget => 4,
            ErrorClass::Degenerate => 5,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_)
            | Error::UnknownFormat(_)
            | Error::IndexOutOfRange { .. } => ErrorClass::Config,
            Error::BudgetExceeded { .. } => ErrorClass::Budget,
            Error::DegenerateBarcode(_) => ErrorClass::Degenerate,
            Error::EmptyInput
            | Error::RaggedRow { .. }
            | Error::NonNumeric { .. }
            | Error::NonFinite { .. }
            | Error::InvalidCloud(_)
            | Error::MalformedBarcode { .. }
            | Error::Io { .. }
            | Error::Json(_) => ErrorClass::Io,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
