use thiserror::Error;

/// Errors produced by the simulation and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected} qubits, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{name} out of range: {detail}")]
    OutOfRange { name: &'static str, detail: String },

    #[error("problem too large for {path}: n = {n}, cap = {cap}")]
    TooLarge {
        path: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    pub(crate) fn range(name: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
