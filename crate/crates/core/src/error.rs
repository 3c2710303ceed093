use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A lattice point or argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters or hyperparameters violate the family's constraints.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A numerical procedure failed (non-convergent sum, singular matrix, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The caller combined arguments in an unsupported way.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at line {line}{}: {message}", field.as_ref().map(|f| format!(", field `{f}`")).unwrap_or_default())]
    Parse {
        line: usize,
        field: Option<String>,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, field: Option<&str>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            field: field.map(str::to_owned),
            message: message.into(),
        }
    }
}
