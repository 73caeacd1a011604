//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested unscaled value is not representable in f64.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Invalid geometry (obstacle not inside the truncation ball, bad polygon, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Mesh generation or mesh invariant failure.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// Text-format parse failure, with the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Linear solve / factorization / eigensolve failure.
    #[error("solver error: {0}")]
    Solver(String),

    /// Spectral truncation is inconsistent with the sampling grid.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// A validation run exceeded its tolerance.
    #[error("tolerance failure: {0}")]
    Tolerance(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
