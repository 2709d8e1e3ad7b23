use std::fmt;

/// Errors produced by scenario loading, configuration validation and the
/// handful of operations with undefined inputs (e.g. IGD with an empty
/// reference front).
#[derive(Debug)]
pub enum Error {
    Io(std::io::Error),
    /// Malformed input file (JSON syntax, wrong shape).
    Parse(String),
    /// Structurally valid input that breaks an invariant (bad cell index,
    /// non-positive geometry, mismatched lengths).
    Validation(String),
    /// Inconsistent run configuration (population not divisible by islands,
    /// migration overflow, ...).
    Config(String),
    /// Operation called on inputs for which it is mathematically undefined.
    UndefinedInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::UndefinedInput(msg) => write!(f, "undefined input: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
