use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic mode mismatch: {0}")]
    ArithmeticModeMismatch(String),

    #[error("negative cell value {value} at cell {cell}")]
    NegativeCell { cell: usize, value: String },

    #[error("premise violated: {0}")]
    PremiseViolated(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invariant {clause} violated at step {step}: {detail}")]
    InvariantViolation {
        clause: String,
        step: usize,
        detail: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invariant(clause: &str, step: usize, detail: impl Into<String>) -> Self {
        Error::InvariantViolation {
            clause: clause.to_string(),
            step,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
