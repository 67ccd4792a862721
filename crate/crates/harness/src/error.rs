use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    ConfigParse(String),

    /// A config field failed validation; `field` is a path like `arms[1].sigma`.
    #[error("config field `{field}`: {message}")]
    ConfigField { field: String, message: String },

    #[error(transparent)]
    Model(#[from] ucblab_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A statistical or oracle check came out negative.
    #[error("verification failed: {0}")]
    Verification(String),
}

impl HarnessError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::ConfigField {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for failed verification, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Verification(_) => 2,
            _ => 1,
        }
    }
}
