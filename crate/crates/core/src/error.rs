use thiserror::Error;

/// Errors raised by fusionkit operations.
///
/// Axiom failures are not errors: they are reported as data in
/// [`AxiomReport`](crate::report::AxiomReport).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed structural validation.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A configured resource bound would be exceeded.
    #[error("resource bound exceeded: {0}")]
    Resource(String),

    /// The field lacks an element required by the construction.
    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    /// Malformed input text.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The input uses a feature outside the supported fragment.
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
