//! Files written by `run`: report.json, stats.csv, throws.csv, transcript.jsonl.

use std::fs;
use std::path::Path;

use qcoin_core::protocol::{ThrowRecord, Transcript, Verdict};
use qcoin_core::stats::model::{cheat_rates, expected_rates, ExpectedRates};
use qcoin_core::stats::{
    honesty_test_with_reference, loss_monitor, DetectionVerdict, RateEstimate, RateSummary,
    RunStats,
};
use qcoin_core::{AliceConfig, CheatKind, MixtureParams, RunConfig};
use serde::Serialize;

use crate::error::CliError;

/// Significance used for the verdicts embedded in every report.
pub const SIGNIFICANCE: f64 = 1e-3;

#[derive(Debug, Serialize)]
pub struct Expected {
    /// Honest failure rate under the configured noise; the test baseline.
    pub honest_failure: f64,
    /// Failure rate of the reference cheat used to estimate the cheated fraction.
    pub cheat_failure: f64,
    /// Model rates for the configured Alice.
    pub configured: ExpectedRates,
}

#[derive(Debug, Serialize)]
pub struct Verdicts {
    pub significance: f64,
    pub honesty: DetectionVerdict,
    pub loss: DetectionVerdict,
}

#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub version: &'static str,
    pub seed: u64,
    pub role: &'static str,
    pub config: &'a RunConfig,
    pub stats: RunStats,
    pub rates: RateSummary,
    pub expected: Expected,
    pub verdicts: Verdicts,
}

fn reference_cheat(alice: &AliceConfig) -> CheatKind {
    match *alice {
        AliceConfig::MixtureCheat(p) => CheatKind::Mixture(p),
        AliceConfig::OptimalCheat { state } => CheatKind::Optimal { state },
        AliceConfig::CheatFraction { inner, .. } => inner,
        AliceConfig::Honest => CheatKind::Mixture(MixtureParams::default()),
    }
}

pub fn build_report<'a>(
    config: &'a RunConfig,
    role: &'static str,
    stats: RunStats,
) -> Result<RunReport<'a>, CliError> {
    let honest_failure = expected_rates(&AliceConfig::Honest, &config.noise).failure;
    let cheat_failure = cheat_rates(&reference_cheat(&config.strategies.alice), &config.noise).failure;
    let honesty = honesty_test_with_reference(&stats, honest_failure, cheat_failure, SIGNIFICANCE)
        .unwrap_or_else(|_| qcoin_core::stats::honesty_test(&stats, honest_failure, SIGNIFICANCE));
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        role,
        config,
        stats,
        rates: stats.summary(),
        expected: Expected {
            honest_failure,
            cheat_failure,
            configured: expected_rates(&config.strategies.alice, &config.noise),
        },
        verdicts: Verdicts {
            significance: SIGNIFICANCE,
            honesty,
            loss: loss_monitor(&stats, 0.5, SIGNIFICANCE),
        },
    })
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

pub fn write_stats_csv(path: &Path, stats: &RunStats) -> Result<(), CliError> {
    let rates = stats.summary();
    let rows: [(&str, u64, u64, RateEstimate); 6] = [
        ("heads", stats.n_heads, stats.n_throws, rates.heads),
        ("tails", stats.n_tails, stats.n_throws, rates.tails),
        ("failures", stats.n_failures, stats.n_throws, rates.failures),
        ("lost", stats.n_lost, stats.attempts(), rates.loss),
        ("alice_wins", stats.n_alice_wins, stats.n_throws, rates.alice_win),
        ("bet_wins", stats.n_bet_matches, stats.n_throws, rates.bet_win),
    ];
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "count", "n", "rate", "lo", "hi"])
        .map_err(|e| csv_error(path, e))?;
    for (name, count, n, r) in rows {
        w.write_record([
            name.to_string(),
            count.to_string(),
            n.to_string(),
            r.value.to_string(),
            r.lo.to_string(),
            r.hi.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    write(path, &bytes)
}

/// One row per kept throw, in order: the data behind a row-of-throws grid.
pub fn write_throws_csv(path: &Path, records: &[ThrowRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "throw_id", "verdict", "coin"])
        .map_err(|e| csv_error(path, e))?;
    for (i, r) in records.iter().filter(|r| r.is_kept()).enumerate() {
        let coin = match r.verdict {
            Verdict::Success(c) => c.to_string(),
            _ => String::new(),
        };
        w.write_record([i.to_string(), r.throw_id.to_string(), r.verdict.name().to_string(), coin])
            .map_err(|e| csv_error(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    write(path, &bytes)
}

pub fn write_run_outputs(
    dir: &Path,
    report: &RunReport<'_>,
    transcript: &Transcript,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    write(&dir.join("report.json"), json.as_bytes())?;
    write_stats_csv(&dir.join("stats.csv"), &report.stats)?;
    write_throws_csv(&dir.join("throws.csv"), transcript.records())?;
    write(&dir.join("transcript.jsonl"), transcript.records_jsonl().as_bytes())
}
