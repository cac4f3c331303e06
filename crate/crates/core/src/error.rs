use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("format error: {0}")]
    Format(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("undefined report: {0}")]
    UndefinedReport(String),
}

impl Error {
    /// Short machine-readable category, used by the CLI error output.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Io(_) => "io",
            Error::Format(_) => "format",
            Error::DegenerateFit(_) => "degenerate-fit",
            Error::UndefinedCorrelation(_) => "undefined-correlation",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::UndefinedReport(_) => "undefined-report",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
