use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qcoin", version, about = "Qutrit quantum coin-tossing simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play a row of throws and write the report, stats and throw grid.
    Run(RunArgs),
    /// Failure rate as a function of the cheated fraction, as CSV.
    Sweep(SweepArgs),
    /// Search for the best definite-state cheating preparation.
    Optimize(OptimizeArgs),
    /// Visibility that yields a target honest failure rate.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AliceKind {
    Honest,
    Mixture,
    Optimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BobKind {
    Honest,
    MeasureEarly,
    DenyLoss,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Trigger {
    LostBet,
    Failure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Alice,
    Bob,
}

/// Noise and Alice's cheat, shared by `run` and `sweep`.
#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// Visibility V of the prepared states, in [0, 1].
    #[arg(long)]
    pub visibility: Option<f64>,
    /// Six detector efficiencies in outcome order B11,B12,B13,B21,B22,B23.
    #[arg(long, value_delimiter = ',', value_name = "E1,..,E6")]
    pub efficiencies: Option<Vec<f64>>,
    /// Probability of sending A12 rather than A21 in the mixture cheat.
    #[arg(long)]
    pub mixture_weight: Option<f64>,
    /// Share of mixture throws sent as a superposition; the sign picks the phase.
    #[arg(long, allow_hyphen_values = true)]
    pub mixture_coherence: Option<f64>,
    /// Real amplitudes of the optimal-cheat state (normalized on use).
    #[arg(long, value_delimiter = ',', value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub optimal_state: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run config, or a previous report.json to replay.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of kept throws.
    #[arg(long)]
    pub throws: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub alice: Option<AliceKind>,
    #[arg(long, value_enum)]
    pub bob: Option<BobKind>,
    /// Fraction of throws on which Alice applies her cheat.
    #[arg(long)]
    pub cheat_fraction: Option<f64>,
    /// Probability that a deny-loss Bob hides an unfavourable result.
    #[arg(long)]
    pub deny_prob: Option<f64>,
    #[arg(long, value_enum)]
    pub deny_trigger: Option<Trigger>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Play one side over TCP; needs --listen or --connect.
    #[arg(long, value_enum)]
    pub role: Option<RoleArg>,
    /// Accept the counterpart on HOST:PORT.
    #[arg(long, value_name = "HOST:PORT", conflicts_with = "connect")]
    pub listen: Option<String>,
    /// Connect to the counterpart at HOST:PORT.
    #[arg(long, value_name = "HOST:PORT")]
    pub connect: Option<String>,
    /// Socket read timeout in milliseconds.
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "qcoin-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Cheat fractions to evaluate; defaults to 0, 0.1, ..., 1.
    #[arg(long, value_delimiter = ',', value_name = "F1,F2,..")]
    pub fractions: Option<Vec<f64>>,
    /// Kept throws per point.
    #[arg(long, default_value_t = 10_000)]
    pub throws: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// The cheat applied on the cheated fraction.
    #[arg(long, value_enum, default_value = "mixture")]
    pub alice: AliceKind,
    #[command(flatten)]
    pub model: ModelArgs,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Honest failure rate to reproduce, in [0, 2/3].
    #[arg(long, allow_hyphen_values = true)]
    pub failure_rate: f64,
}
