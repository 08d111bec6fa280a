use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no checks")]
    NoChecks,

    #[error("check {0} is the identity (all-zero row)")]
    ZeroRow(usize),

    #[error("checks {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("Hx row {0} and Hz row {1} overlap oddly (Hx·Hzᵀ ≠ 0)")]
    NotOrthogonal(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("code validation failed: {0}")]
    Validation(String),

    #[error("duplicate variable {0} in cardinality constraint")]
    DuplicateVar(u32),

    #[error("exactly-one over an empty set is unsatisfiable")]
    EmptyExactlyOne,

    #[error("solver backend failure: {0}")]
    Backend(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("instruction {0} is not a unitary Clifford gate")]
    NonUnitary(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
