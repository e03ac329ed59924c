use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: at least one atom is required")]
    EmptyInput,
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("non-finite value {0}")]
    NonFiniteValue(f64),
    #[error("level {0} outside the admissible range")]
    BadLevel(f64),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("sample count must be at least 1, got {0}")]
    BadCount(usize),
    #[error("exponent p must satisfy p >= 1, got {0}")]
    BadExponent(f64),
    #[error("invalid density: {0}")]
    BadDensity(String),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("invalid traded asset: {0}")]
    BadAsset(String),
    #[error("unsupported specification: {0}")]
    UnsupportedSpec(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("right derivative unavailable: {0}")]
    DerivativeUnavailable(String),
    #[error("contamination level must lie in [0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("payoff must be strictly positive on every state")]
    NonPositivePayoff,
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("invalid scenario data: {0}")]
    BadScenario(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::BadScenario(e.to_string())
    }
}
