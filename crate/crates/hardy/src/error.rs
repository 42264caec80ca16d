use thiserror::Error;

use crate::expr::{DomainError, ParseError};
use crate::quad::QuadError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("step size underflow; last reachable point t = {t_reached:e}")]
    StepUnderflow { t_reached: f64 },
    #[error("step budget exhausted at t = {t_reached:e}")]
    TooManySteps { t_reached: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("solution oscillates near t = {t:e}; the operator is not nonnegative there")]
    Oscillation { t: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("config `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
