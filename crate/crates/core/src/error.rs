use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// The state norm drifted beyond tolerance; carries the offending time.
    #[error("integration failure at t = {time_fs} fs: norm drift {drift:e} exceeds {tolerance:e}")]
    IntegrationFailure { time_fs: f64, drift: f64, tolerance: f64 },

    #[error("config syntax error: {message}")]
    ConfigSyntax { message: String, field: Option<String> },

    #[error("config invalid at {field}: {message}")]
    ConfigInvalid { field: String, message: String },

    #[error("unknown config key {field}")]
    ConfigUnknownKey { field: String },

    #[error("{failed} of {total} validation checks failed")]
    ValidationFailed { failed: usize, total: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable code, used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::InvalidConfiguration(_) => "invalid-configuration",
            Error::IntegrationFailure { .. } => "integration-failure",
            Error::ConfigSyntax { .. } => "config-syntax",
            Error::ConfigInvalid { .. } => "config-invalid",
            Error::ConfigUnknownKey { .. } => "config-unknown-key",
            Error::ValidationFailed { .. } => "validation-failed",
            Error::Io { .. } => "io",
        }
    }

    /// Config path the error refers to, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::ConfigSyntax { field, .. } => field.as_deref(),
            Error::ConfigInvalid { field, .. } | Error::ConfigUnknownKey { field } => Some(field),
            _ => None,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigInvalid { field: field.into(), message: message.into() }
    }
}
