use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input space: {0}")]
    InvalidInputSpace(String),

    #[error("invalid message space: {0}")]
    InvalidMessageSpace(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("invalid game spec: {0}")]
    InvalidGame(String),

    #[error("invalid receiver: {0}")]
    InvalidReceiver(String),

    #[error("empty equivalence class for message {0}")]
    EmptyClass(usize),

    #[error("epsilon_M undefined: message space has fewer than two messages")]
    EpsilonUndefined,

    #[error("search space of {required} protocols exceeds budget {budget}")]
    BudgetExceeded { required: f64, budget: f64 },

    #[error("{0} undefined (zero variance)")]
    ZeroVariance(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: u64,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
