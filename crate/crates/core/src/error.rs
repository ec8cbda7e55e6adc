//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix length does not match what the operation requires.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An invalid configuration value (kind, sizes, sigma, block count, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid input data (empty pair list, zero vector, too-small dataset, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An argument lies outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
