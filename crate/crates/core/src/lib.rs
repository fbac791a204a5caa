//! Simulation of a qutrit quantum coin-flipping protocol, its cheating
//! strategies, and the statistics used to detect them.

// `!(x > 0.0)` is how validation rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod net;
pub mod optimizer;
pub mod protocol;
pub mod qutrit;
pub mod stats;
pub mod strategies;

pub use config::{ConfigError, RunConfig};
pub use net::{ChannelConfig, ChannelError, ChannelMode, Role};
pub use protocol::{ProtocolError, ProtocolMessage, ThrowRecord, Transcript, Verdict};
pub use qutrit::{
    BasisLabel, Coin, DensityOperator, NoiseModel, OutcomeLabel, QutritError, QutritState,
    StateLabel,
};
pub use stats::{run_batch, RateEstimate, RunStats, SimulationError};
pub use strategies::{AliceConfig, BobConfig, CheatKind, MixtureParams, StrategyConfig};
