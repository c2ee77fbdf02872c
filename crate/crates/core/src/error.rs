use thiserror::Error;

/// Errors raised across the quantization, budgeting, channel and sweep layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability vector is empty")]
    Empty,

    #[error("probability vector needs at least 2 classes, got {0}")]
    TooFewClasses(usize),

    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("entry {index} is not finite")]
    NonFinite { index: usize },

    #[error("entries sum to zero")]
    ZeroMass,

    #[error("entries sum to {0}, expected 1 within 1e-9")]
    NotNormalized(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("support mismatch at index {index}: q is zero where p = {p_val} > 0")]
    SupportMismatch { index: usize, p_val: f64 },

    #[error("composition sums to {actual}, expected {expected}")]
    SumMismatch { expected: u64, actual: u64 },

    #[error("index out of range for a set of {cardinality} elements")]
    IndexOutOfRange { cardinality: String },

    #[error("invalid position set: {0}")]
    InvalidSubset(String),

    #[error("selected top entries carry zero mass")]
    ZeroTopMass,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("beta_s = {beta_s} must exceed delta = {delta}")]
    BetaNotAboveDelta { beta_s: f64, delta: f64 },

    #[error("target error probability {epsilon} outside ({lower}, {upper})")]
    EpsilonOutOfRange { epsilon: f64, lower: f64, upper: f64 },

    #[error("no feasible blocklength: {0}")]
    NoFeasibleN(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("row at line {line} has {found} entries, expected {expected}")]
    RaggedRows { line: usize, expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("payload error: {0}")]
    Payload(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
