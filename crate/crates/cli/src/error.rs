use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("malformed configuration: {0}")]
    Parse(String),

    #[error("invalid configuration at `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("bad control history {path}: {message}")]
    Controls { path: String, message: String },

    #[error(transparent)]
    Core(#[from] cw_seed::Error),
}

impl CliError {
    /// Process exit code: 2 for unusable input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Read { .. } | Self::Parse(_) | Self::Validation { .. } | Self::Controls { .. } => 2,
            Self::Core(cw_seed::Error::InvalidInput(_)) => 2,
            _ => 1,
        }
    }
}
