use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("non-finite coordinate at point {index}")]
    InvalidCoordinate { index: usize },
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("neighborhood has {count} points, need at least {required}")]
    InsufficientNeighbors { count: usize, required: usize },
    #[error("all kernel weights are zero")]
    DegenerateWeights,
    #[error("neighborhood does not span a plane")]
    DegenerateNeighborhood,
    #[error("no radius on the sweep grid yields a usable neighborhood")]
    NoUsableScale,
    #[error("sample count must be at least 1, got {0}")]
    InvalidCount(i64),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("length mismatch: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value at position {0}")]
    InvalidValue(usize),
    #[error("correlation undefined for constant input")]
    UndefinedCorrelation,
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0}")]
    Format(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Job { context: String, source: Box<Error> },
}

impl Error {
    /// Short machine-readable category, used for CLI exit messages.
    pub fn category(&self) -> &'static str {
        match self {
            Error::EmptyCloud | Error::InvalidCoordinate { .. } => "input",
            Error::InvalidRadius(_) | Error::InvalidArgument(_) | Error::InvalidCount(_) => {
                "argument"
            }
            Error::InsufficientNeighbors { .. }
            | Error::DegenerateWeights
            | Error::DegenerateNeighborhood
            | Error::NoUsableScale => "estimation",
            Error::InvalidSurface(_) => "surface",
            Error::ShapeMismatch(..)
            | Error::EmptyInput
            | Error::InvalidValue(_)
            | Error::UndefinedCorrelation => "metric",
            Error::Io { .. } => "io",
            Error::Format(_) | Error::Row { .. } => "format",
            Error::Config(_) => "config",
            Error::Job { source, .. } => source.category(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}
