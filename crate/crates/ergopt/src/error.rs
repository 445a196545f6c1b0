//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation requested outside the function's or potential's domain.
    #[error("point {x} is outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    /// Two grid functions do not share resolution, mode or domain.
    #[error("grid shape mismatch: {0}")]
    Shape(String),

    /// Invalid argument value (tolerances, truncation orders, bump geometry, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Unknown catalog entry.
    #[error("unknown potential {0:?}")]
    Catalog(String),

    /// A dynamical system could not be built from the given data.
    #[error("construction failed: {0}")]
    Construction(String),

    /// No inverse branch is admissible at a grid point; the working interval
    /// does not match the potential's domain.
    #[error("no admissible branch at x = {x}")]
    Coverage { x: f64 },

    /// A non-finite value appeared where a real number was required.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Parameter outside the validity window of a closed-form expression.
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed CSV / config input.
    #[error("parse error: {0}")]
    Parse(String),
}
