use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity error: degree {requested} exceeds configured maximum {max}")]
    Capacity { requested: usize, max: usize },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("singular local system on interval {interval}, mode {mode}")]
    SingularLocalSystem { interval: usize, mode: usize },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("config error at key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
