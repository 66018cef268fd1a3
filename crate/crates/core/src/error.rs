use thiserror::Error;

use crate::expr::SyntaxError;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure classes, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numeric,
    ZeroFunction,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: bounds must be finite with lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("point ({x}, {y}) is outside the domain: {reason}")]
    DomainError { x: f64, y: f64, reason: String },

    #[error("point ({x}, {y}) is not a node of the tabulated grid")]
    UnsupportedOffGrid { x: f64, y: f64 },

    #[error("unknown builtin function {0:?}")]
    UnknownBuiltin(String),

    #[error(transparent)]
    Syntax(#[from] SyntaxError),

    #[error("tabulated input: {0}")]
    Tabulated(String),

    #[error("function vanishes on the selection grid (first pivot below 1e-300)")]
    ZeroFunction,

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("rank {requested} is not admissible (must lie in 1..={max})")]
    InvalidRank { requested: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidInterval { .. }
            | Error::InvalidGrid(_)
            | Error::UnknownBuiltin(_)
            | Error::Syntax(_)
            | Error::Tabulated(_)
            | Error::InvalidRank { .. }
            | Error::InvalidConfig(_)
            | Error::Io(_)
            | Error::Json(_) => ErrorClass::Config,
            Error::DomainError { .. } | Error::UnsupportedOffGrid { .. } | Error::Numeric(_) => {
                ErrorClass::Numeric
            }
            Error::ZeroFunction => ErrorClass::ZeroFunction,
        }
    }
}
