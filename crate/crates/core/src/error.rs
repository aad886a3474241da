use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a Poisson ideal: {{x{i}, f{mu}}} is not in the ideal")]
    NotPoissonIdeal { i: usize, mu: usize },
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("slice of dimension {size} exceeds the cap of {cap} monomials")]
    ResourceLimit { size: usize, cap: usize },
    #[error("cocycle condition fails: {0}")]
    Cocycle(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
