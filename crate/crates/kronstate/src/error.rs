use thiserror::Error;

use crate::numeric::SurdSum;

#[derive(Debug, Error)]
pub enum KronError {
    #[error("input error: {0}")]
    Input(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tuple {0} is outside the W polytope")]
    OutsidePolytope(String),
    #[error("resource cap exceeded: {0}")]
    Cap(String),
    #[error("residual norm squared is irrational: {0}")]
    IrrationalNorm(SurdSum),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, KronError>;
