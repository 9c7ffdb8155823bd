//! Base ring arithmetic: exact rationals, Laurent polynomials, and rational linear algebra.

pub mod laurent;
pub mod linalg;
pub mod rational;

pub use laurent::{ExponentVector, LaurentPoly, Ring, Variable};
pub use linalg::QMatrix;
pub use rational::Rational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("ring context mismatch: {left} vs {right} variables")]
    Context { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableIndex { index: usize, nvars: usize },
    #[error("negative power of a non-invertible variable in `{0}`")]
    NotInvertible(String),
    #[error("parse error: {0}")]
    Parse(String),
}
