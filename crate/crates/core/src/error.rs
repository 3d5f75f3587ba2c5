use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its type's invariants. `key` names the
    /// offending setting using the same spelling as the config file.
    #[error("invalid `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sweep cell kind={kind} alpha={alpha} beta={beta} seed={seed}: {source}")]
    Cell {
        kind: String,
        alpha: f64,
        beta: f64,
        seed: u64,
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input rather than IO or a bug.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } | Error::Parse { .. } => true,
            Error::Cell { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
