//! Serializable run configuration shared by the library drivers and the CLI.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::ChannelConfig;
use crate::qutrit::NoiseModel;
use crate::strategies::StrategyConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
        }
    }
}

/// Everything needed to reproduce a run exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Number of kept (non-lost) throws.
    pub throws: u64,
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub strategies: StrategyConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            throws: 1000,
            seed: 0,
            noise: NoiseModel::ideal(),
            strategies: StrategyConfig::honest(),
            channel: ChannelConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.throws == 0 {
            return Err(ConfigError::invalid("throws", "must be at least 1"));
        }
        self.noise
            .validate()
            .map_err(|e| ConfigError::invalid("noise", e.to_string()))?;
        self.strategies.validate()?;
        self.channel.validate()?;
        Ok(())
    }
}
