use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("duplicate entry: {0}")]
    Duplicate(String),
    #[error("unknown element: {0}")]
    UnknownElement(String),
    #[error("covers contain a cycle through {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("not a lattice: {0} and {1} have no {2}")]
    NotALattice(String, String, &'static str),
    #[error("unknown builtin: {0}")]
    UnknownBuiltin(String),
    #[error("parameter too large: {0}")]
    ParamTooLarge(String),
    #[error("{0} is not below {1}")]
    NotAnInterval(String, String),
    #[error("not a congruence: {0}")]
    NotACongruence(String),
    #[error("invalid QO-system: {0}")]
    InvalidQoSystem(String),
    #[error("vector is not in F(P): {0}")]
    NotInF(String),
    #[error("first argument is not below the second")]
    NotBelow,
    #[error("no refinement matrix found")]
    RefinementNotFound,
    #[error("lattice is not distributive")]
    NotDistributive,
    #[error("lattice is not modular")]
    NotModular,
    #[error("lattice is not {0}")]
    Precondition(&'static str),
    #[error("{check} failed: {}", .witness.join(", "))]
    Mismatch { check: String, witness: Vec<String> },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub fn mismatch(check: &str, witness: Vec<String>) -> Self {
        Error::Mismatch { check: check.to_string(), witness }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
