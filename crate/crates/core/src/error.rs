use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid spin value {value} at index {index}; spins must be -1 or +1")]
    InvalidSpin { index: usize, value: i8 },

    #[error("graph must be unweighted (entries in {{0, 1}}); found {value} at ({row}, {col})")]
    WeightedGraph { row: usize, col: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem size {n} exceeds the exhaustive-search limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("G-set parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("trajectory diverged at step {step}")]
    Diverged { step: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("incompatible architecture: {0}")]
    IncompatibleArchitecture(String),

    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },

    #[error("serialization error: {0}")]
    Serde(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serde(err.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}
