use thiserror::Error;

use crate::superpoly::VariableId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("malformed scalar: {0}")]
    ScalarSyntax(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("expected an {expected} variable, got {var}")]
    WrongParity {
        expected: &'static str,
        var: VariableId,
    },

    #[error("variable {var} is not allowed here: {reason}")]
    WrongFamily { var: VariableId, reason: String },

    #[error("variable index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator has mixed Grassmann parity")]
    MixedParity,

    #[error("the Killing form is degenerate, no inverse metric is available")]
    MissingInverseMetric,

    #[error("the Killing form is nondegenerate: {0}")]
    NondegenerateMetric(String),

    #[error("expected {expected} generators, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unknown algebra {0:?}")]
    UnknownAlgebra(String),

    #[error("invalid structure constant table: {0}")]
    InvalidTable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
