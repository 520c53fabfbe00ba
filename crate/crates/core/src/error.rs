use thiserror::Error;

use crate::format::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures shared by every module of the toolkit.
///
/// The variants double as the machine-readable categories printed by the
/// command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Short category tag, stable for scripts.
    pub fn category(&self) -> &'static str {
        match self {
            Error::UnknownNode(_) | Error::Query(_) => "query",
            Error::Structure(_) => "structure",
            Error::Argument(_) => "argument",
            Error::Guard(_) => "guard",
            Error::Numeric(_) => "numeric",
            Error::Parse(_) => "parse",
        }
    }
}
