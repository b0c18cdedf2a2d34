use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("trivial metric space: all distances are zero")]
    TrivialSpace,

    #[error("scaling factor must be positive and finite, got {0}")]
    NonPositiveFactor(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("size mismatch: {left} vs {right} points")]
    SizeMismatch { left: usize, right: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("complex too large: {count} simplices exceed the budget of {budget}")]
    TooLarge { count: u128, budget: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("all points coincide; nothing to project")]
    DuplicateOnlyCloud,

    #[error("input is not Euclidean: eigenvalue {eigenvalue} is below -{tolerance} (use clamping to override)")]
    NonEuclideanInput { eigenvalue: f64, tolerance: f64 },

    #[error("target dimension {requested} exceeds the realization rank {rank}")]
    SizeError { requested: usize, rank: usize },

    #[error("map is not biLipschitz: pair ({0}, {1}) has zero distance on exactly one side")]
    NotBiLipschitz(usize, usize),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("config error at line {line}, field `{field}`: {message}")]
    Config {
        line: usize,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
