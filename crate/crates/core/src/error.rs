use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside its allowed range.
    #[error("invalid argument `{name}`: {reason}")]
    Argument { name: &'static str, reason: String },

    /// An input matrix or state fails a structural check (Hermiticity, trace, unitarity, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A sweep point failed; carries the swept parameter value.
    #[error("sweep point {param} = {value} failed: {source}")]
    SweepPoint {
        param: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed csv at {path}: {reason}")]
    Csv { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn argument(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Argument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_argument(&self) -> bool {
        match self {
            Error::Argument { .. } => true,
            Error::SweepPoint { source, .. } => source.is_argument(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
