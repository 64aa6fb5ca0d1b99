//! Crate-wide error type.

/// Errors produced by configuration, shape and input validation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A structural parameter is out of its valid range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A vector or index does not match the expected dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An input value is rejected (non-finite, empty, or otherwise unusable).
    #[error("invalid input: {0}")]
    Input(String),

    /// Serialization or deserialization of a model or checkpoint failed.
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    /// File I/O during experiment output or config loading failed.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    /// A config file or CLI value could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
