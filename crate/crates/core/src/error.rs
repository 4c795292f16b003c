use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate, cell id or part id outside its valid range.
    #[error("input out of domain: {0}")]
    InputDomain(String),
    /// Invalid parameters; `field` names the offending setting.
    #[error("invalid {field}: {message}")]
    Config { field: String, message: String },
    #[error("size mismatch: expected {expected} entries, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
