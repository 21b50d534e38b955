use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("failed to parse rational {0:?}")]
    ParseRational(String),
    #[error("expected a positive value, got {0}")]
    NonPositive(String),
    #[error("expected a nonnegative value, got {0}")]
    Negative(String),
    #[error("Bernoulli parameter must lie strictly between 0 and 1, got {0}")]
    BadBernoulli(String),
    #[error("exponent r must lie in [0, 1], got {0}")]
    BadExponent(f64),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("label {0:?} is not an atom of the space")]
    UnknownLabel(String),
    #[error("not a bijection: {0}")]
    NotBijective(String),
    #[error("map is not measure compatible at target {label:?}: preimage mass {preimage}, target mass {target}")]
    MeasureIncompatible {
        label: String,
        preimage: String,
        target: String,
    },
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid polymorphism: {0}")]
    InvalidPolymorphism(String),
    #[error("unsupported operator-norm exponent {0}")]
    UnsupportedExponent(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("index mismatch: left factor ends at {left}, right factor starts at {right}")]
    IndexMismatch { left: usize, right: usize },
    #[error("double-coset product did not stabilize: N={n} gives {first}, N={next} gives {second}")]
    StabilizationFailure {
        n: usize,
        next: usize,
        first: String,
        second: String,
    },
    #[error("no stabilization found up to j={0}")]
    NoWeakLimit(usize),
    #[error("partition chain is not refining at step {0}")]
    NotRefining(usize),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
