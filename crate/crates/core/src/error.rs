use std::fmt;

use thiserror::Error;

use crate::scalar::ComplexScalar;

/// Failure of a single point evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    /// A denominator fell below the pole threshold.
    #[error("pole at {0}")]
    Pole(ComplexScalar),
    /// An intermediate magnitude exceeded the overflow cap.
    #[error("overflow at {0}")]
    Overflow(ComplexScalar),
}

/// Position and expectation attached to an expression syntax error.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Syntax(SyntaxError),
    #[error("expression is not a rational function (contains an exponential)")]
    NotRational,
    #[error("division by an identically zero expression")]
    ZeroDivisor,
    #[error("root cluster near {location} is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { location: ComplexScalar, condition: f64 },
    #[error("contour passes through a zero near radius {radius} and could not be moved clear")]
    BoundaryZero { radius: f64 },
    #[error("zero localization did not resolve a cell near {location}: {reason}")]
    Localization { location: ComplexScalar, reason: String },
    #[error("radius {radius} outside the valid range ({min}, {max}]")]
    RadiusOutOfRange { radius: f64, min: f64, max: f64 },
    #[error("quadrature on |z| = {radius} did not reach tolerance (last change {last_change:.3e})")]
    QuadratureFailure { radius: f64, last_change: f64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("degenerate targets: {0}")]
    DegenerateTargets(String),
    #[error("targets {first} and {second} are identical")]
    NonDistinctTargets { first: usize, second: usize },
    #[error("identity check failed for {what}: max relative error {max_rel_error:.3e}")]
    IdentityViolation { what: String, max_rel_error: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
