use thiserror::Error;

/// Errors raised anywhere in the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("feature vector sums to zero")]
    AllZero,
    #[error("negative element {value} at index {index}")]
    NegativeElement { index: usize, value: f64 },
    #[error("non-finite element at index {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("feature vector invariant violated at index {index}: {reason}")]
    InvariantViolation { index: usize, reason: String },
    #[error("feature dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("degenerate PBR denominator N - mu = {0}")]
    DegenerateDenominator(f64),
    #[error("probability {value} at index {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("invalid kernel parameters: {0}")]
    InvalidKernel(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("invalid SVM problem: {0}")]
    InvalidProblem(String),
    #[error("empty sample")]
    EmptySample,
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("empty input")]
    EmptyInput,
    #[error("class {class} has {count} members, need at least {needed}")]
    ClassTooSmall { class: usize, count: usize, needed: usize },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("negative feature value at line {line}, column {column}")]
    NegativeFeature { line: usize, column: usize },
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
