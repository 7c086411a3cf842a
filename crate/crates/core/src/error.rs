//! Error types shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A generator or experiment specification violates a precondition.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A resolvent or simulation was requested outside its spectral
    /// validity region.
    #[error("spectral validity violated: {0}")]
    SpectralValidity(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// A matrix that must be inverted is numerically singular.
    #[error("degenerate system in {0}")]
    Degenerate(String),

    /// A design matrix is rank deficient; the index is the first column
    /// that adds no new direction.
    #[error("rank-deficient design matrix at column {column}")]
    RankDeficient { column: usize },

    /// An oracle was called above its size cap.
    #[error("{op} supports n <= {max}, got n = {n}")]
    SizeLimit { op: String, n: usize, max: usize },

    /// A file or text record does not match its documented format.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
