//! Error types shared across the crate.

use thiserror::Error;

use crate::bundle::WindowViolation;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter outside its documented domain (k < 1, negative degree, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The polynomial text did not match the term grammar.
    #[error("parse error: {0}")]
    Parse(String),

    /// An extension class lies outside the canonical window for (k, j).
    #[error("extension class outside the canonical window: {}",
            WindowViolation::describe_all(.0))]
    Window(Vec<WindowViolation>),

    /// Scaling an extension class by zero.
    #[error("scaling an extension class by zero is not invertible")]
    ZeroScale,

    /// A stabilisation loop ran past its hard cap; indicates an internal
    /// bound bug, never a property of the input.
    #[error("internal stabilisation failure in {context}: no agreement after {rounds} rounds")]
    Stabilisation { context: &'static str, rounds: usize },

    /// Violation of an internal invariant (a bug, not a user error).
    #[error("internal error: {0}")]
    Internal(String),

    /// Vector length does not match the ambient dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
