use std::path::PathBuf;

use gridsched::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid value for `{key}`: expected {valid}")]
    Invalid { key: String, valid: String },

    #[error("config file: {0}")]
    ConfigFile(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Sim(#[from] SimError),
}

impl CliError {
    pub fn invalid(key: impl Into<String>, valid: impl Into<String>) -> Self {
        CliError::Invalid {
            key: key.into(),
            valid: valid.into(),
        }
    }
}
