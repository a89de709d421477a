use thiserror::Error;

/// Errors raised by matrix, process and supermap operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Two wires that must be plugged together carry different systems.
    #[error("wire mismatch: {left} does not match {right}")]
    WireMismatch { left: String, right: String },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
