use std::path::PathBuf;

use crate::codec::Scheme;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A codec or sweep configuration violates one of its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scheme `{0}` is stochastic and has no codebook")]
    UnsupportedScheme(Scheme),

    /// A scalar argument outside the domain of a function (negative snr, etc).
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The brute-force oracle refuses instances it cannot enumerate.
    #[error("instance too large for exhaustive evaluation: {0}")]
    TooLarge(String),

    /// A computation produced a non-finite or otherwise unusable value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
