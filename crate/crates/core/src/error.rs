use thiserror::Error;

use crate::arith::ArithError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("malformed input: {0}")]
    Schema(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("presentation violates the Lie-Rinehart axioms: {0}")]
    Axioms(String),
    #[error("unsupported grading: {0}")]
    UnsupportedGrading(String),
    #[error("not a cocycle: {0}")]
    NotCocycle(String),
    #[error("multidegree {0} lies outside the cohomology window")]
    OutsideWindow(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
