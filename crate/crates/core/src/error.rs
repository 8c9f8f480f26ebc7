use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The request exceeds a configured size limit (vertex count, table size, ...).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("operation requires the {required} label model")]
    UnsupportedModel { required: &'static str },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
