use std::io;
use std::path::PathBuf;

use qcoin_core::net::SessionAbort;
use qcoin_core::{ConfigError, QutritError, SimulationError};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Usage {
        field: Option<String>,
        message: String,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] QutritError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("session aborted after {} records: {}", .0.transcript.records().len(), .0.error)]
    Session(Box<SessionAbort>),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn usage(field: &str, message: impl Into<String>) -> Self {
        CliError::Usage {
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage { .. } => "usage",
            CliError::Config(_) => "invalid_config",
            CliError::Model(_) => "invalid_model",
            CliError::Simulation(_) => "simulation",
            CliError::Session(abort) => abort.error.kind(),
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
        }
    }

    fn field(&self) -> Option<&str> {
        match self {
            CliError::Usage { field, .. } => field.as_deref(),
            CliError::Config(e) => e.field(),
            _ => None,
        }
    }

    /// Usage and configuration problems exit with 2, everything else with 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } | CliError::Config(_) | CliError::Model(_) | CliError::Parse { .. } => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut error = json!({
            "kind": self.kind(),
            "message": self.to_string(),
        });
        if let Some(field) = self.field() {
            error["field"] = json!(field);
        }
        if let CliError::Session(abort) = self {
            error["records"] = json!(abort.transcript.records().len());
        }
        json!({ "error": error })
    }
}

impl From<SessionAbort> for CliError {
    fn from(abort: SessionAbort) -> Self {
        CliError::Session(Box::new(abort))
    }
}
