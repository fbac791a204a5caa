use std::io;

use serde::{Deserialize, Serialize};

use super::interval::wilson_95;
use super::model;
use super::{RunStats, SimulationError};
use crate::protocol::{play_throw, AliceSession, BobSession, Transcript};
use crate::qutrit::NoiseModel;
use crate::strategies::{AliceConfig, BobConfig, CheatKind, StrategyConfig};

/// Attempts allowed per requested kept throw before a run is abandoned.
pub const ATTEMPTS_PER_THROW: u64 = 1000;

pub fn build_sessions(
    strategies: &StrategyConfig,
    noise: &NoiseModel,
    seed: u64,
) -> Result<(AliceSession, BobSession), SimulationError> {
    noise.validate()?;
    let alice = AliceSession::new(strategies.alice.build()?, seed);
    let bob = BobSession::new(strategies.bob.build()?, *noise, seed);
    Ok((alice, bob))
}

fn drive(
    mut alice: AliceSession,
    mut bob: BobSession,
    n: u64,
) -> Result<(RunStats, Transcript), SimulationError> {
    let budget = n.saturating_mul(ATTEMPTS_PER_THROW).saturating_add(ATTEMPTS_PER_THROW);
    let mut stats = RunStats::default();
    while stats.n_throws < n {
        if stats.attempts() >= budget {
            return Err(SimulationError::AttemptBudget {
                kept: stats.n_throws,
                attempts: stats.attempts(),
            });
        }
        let record = play_throw(&mut alice, &mut bob)?;
        stats.record(&record);
    }
    Ok((stats, alice.into_transcript()))
}

/// Runs until `n` throws are kept, re-throwing after every loss. The
/// transcript is Alice's view, which carries all four message kinds.
pub fn run_batch(
    n: u64,
    strategies: &StrategyConfig,
    noise: &NoiseModel,
    seed: u64,
) -> Result<(RunStats, Transcript), SimulationError> {
    let (alice, bob) = build_sessions(strategies, noise, seed)?;
    drive(alice, bob.without_message_log(), n)
}

/// As [`run_batch`] but keeps no message log; records only.
pub fn run_stats(
    n: u64,
    strategies: &StrategyConfig,
    noise: &NoiseModel,
    seed: u64,
) -> Result<RunStats, SimulationError> {
    let (alice, bob) = build_sessions(strategies, noise, seed)?;
    drive(alice.without_message_log(), bob.without_message_log(), n).map(|(s, _)| s)
}

/// Seed used for point `index` of a sweep.
pub fn sweep_point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// One row of the failure-vs-cheat-fraction curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub x: f64,
    pub n: u64,
    pub failures: u64,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Honest Bob against an Alice who cheats on a fraction `x` of throws.
pub fn cheat_fraction_sweep(
    fractions: &[f64],
    inner: &CheatKind,
    noise: &NoiseModel,
    n_per_point: u64,
    seed: u64,
) -> Result<Vec<SweepPoint>, SimulationError> {
    fractions
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let strategies = StrategyConfig::new(
                AliceConfig::CheatFraction {
                    fraction: x,
                    inner: *inner,
                },
                BobConfig::Honest,
            );
            let stats = run_stats(n_per_point, &strategies, noise, sweep_point_seed(seed, i))?;
            let rate = wilson_95(stats.n_failures, stats.n_throws);
            Ok(SweepPoint {
                x,
                n: stats.n_throws,
                failures: stats.n_failures,
                rate: rate.value,
                lo: rate.lo,
                hi: rate.hi,
            })
        })
        .collect()
}

/// Endpoints `(f0, f1)` of the affine theory line for a sweep.
pub fn sweep_theory(inner: &CheatKind, noise: &NoiseModel) -> (f64, f64) {
    (
        model::expected_rates(&AliceConfig::Honest, noise).failure,
        model::cheat_rates(inner, noise).failure,
    )
}

/// Writes the sweep table with columns `x,n,failures,rate,lo,hi`.
pub fn write_sweep_csv<W: io::Write>(points: &[SweepPoint], out: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for p in points {
        writer.serialize(p)?;
    }
    writer.flush()?;
    Ok(())
}
