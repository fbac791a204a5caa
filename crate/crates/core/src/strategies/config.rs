use serde::{Deserialize, Serialize};

use super::{
    AliceStrategy, BobStrategy, CheatFractionAlice, DenyLossBob, DenyTrigger, HonestAlice,
    HonestBob, MeasureEarlyBob, MixtureCheatAlice, MixtureParams, OptimalCheatAlice,
};
use crate::config::ConfigError;
use crate::qutrit::QutritState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheatKind {
    Mixture(MixtureParams),
    Optimal { state: QutritState },
}

impl CheatKind {
    pub fn build(&self) -> Result<Box<dyn AliceStrategy>, ConfigError> {
        Ok(match self {
            CheatKind::Mixture(params) => Box::new(MixtureCheatAlice::new(*params)?),
            CheatKind::Optimal { state } => Box::new(OptimalCheatAlice::new(*state)),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AliceConfig {
    #[default]
    Honest,
    MixtureCheat(MixtureParams),
    OptimalCheat {
        state: QutritState,
    },
    CheatFraction {
        fraction: f64,
        inner: CheatKind,
    },
}

impl AliceConfig {
    pub fn build(&self) -> Result<Box<dyn AliceStrategy>, ConfigError> {
        Ok(match self {
            AliceConfig::Honest => Box::new(HonestAlice),
            AliceConfig::MixtureCheat(params) => CheatKind::Mixture(*params).build()?,
            AliceConfig::OptimalCheat { state } => CheatKind::Optimal { state: *state }.build()?,
            AliceConfig::CheatFraction { fraction, inner } => {
                Box::new(CheatFractionAlice::new(*fraction, inner.build()?)?)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BobConfig {
    #[default]
    Honest,
    MeasureEarly,
    DenyLoss {
        probability: f64,
        #[serde(default)]
        trigger: DenyTrigger,
    },
}

impl BobConfig {
    pub fn build(&self) -> Result<Box<dyn BobStrategy>, ConfigError> {
        Ok(match self {
            BobConfig::Honest => Box::new(HonestBob),
            BobConfig::MeasureEarly => Box::new(MeasureEarlyBob),
            BobConfig::DenyLoss {
                probability,
                trigger,
            } => Box::new(DenyLossBob::new(*probability, *trigger)?),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    #[serde(default)]
    pub alice: AliceConfig,
    #[serde(default)]
    pub bob: BobConfig,
}

impl StrategyConfig {
    pub fn new(alice: AliceConfig, bob: BobConfig) -> Self {
        StrategyConfig { alice, bob }
    }

    pub fn honest() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.alice.build()?;
        self.bob.build()?;
        Ok(())
    }
}
