//! Batch execution, rate estimation, and cheat detection.

mod batch;
mod detect;
mod interval;
pub mod model;
mod run;

use thiserror::Error;

pub use batch::{
    build_sessions, cheat_fraction_sweep, run_batch, run_stats, sweep_point_seed, sweep_theory,
    write_sweep_csv, SweepPoint, ATTEMPTS_PER_THROW,
};
pub use detect::{
    binomial_lower_tail, binomial_upper_tail, estimate_cheat_fraction, honesty_test,
    honesty_test_with_reference, loss_monitor, CheatFractionEstimate, Decision, DetectionVerdict,
};
pub use interval::{wilson_95, wilson_interval, RateEstimate, Z_95};
pub use run::{RateSummary, RunStats};

use crate::config::ConfigError;
use crate::protocol::ProtocolError;
use crate::qutrit::QutritError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("cheat failure rate {f1} must exceed the honest baseline {f0}")]
    DegenerateCurve { f0: f64, f1: f64 },
    #[error("no kept throws to estimate from")]
    EmptySample,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Noise(#[from] QutritError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("gave up after {attempts} attempts with only {kept} kept throws")]
    AttemptBudget { kept: u64, attempts: u64 },
}
