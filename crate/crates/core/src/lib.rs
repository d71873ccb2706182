//! Numerical toolkit for value-distribution checks of meromorphic functions on annuli.

pub mod divisor;
pub mod error;
pub mod expr;
pub mod functionals;
pub mod growth;
pub mod laurent;
pub mod locate;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod report;
pub mod roots;
pub mod sample;
pub mod scalar;
pub mod settings;
pub mod sharing;
pub mod suite;
pub mod transforms;

pub use error::{Error, EvalError, Result};
pub use expr::{MeroExpr, Node};
pub use scalar::ComplexScalar;
