mod args;
mod config;
mod error;
mod output;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use qcoin_core::net::{run_party, Role};
use qcoin_core::optimizer::{optimize_cheat_state, OptimizerConfig};
use qcoin_core::qutrit::calibrate_visibility;
use qcoin_core::stats::{cheat_fraction_sweep, run_batch, write_sweep_csv};
use qcoin_core::NoiseModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use args::{CalibrateArgs, Cli, Command, OptimizeArgs, RoleArg, RunArgs, SweepArgs};
use error::CliError;

fn print_json(value: &serde_json::Value) {
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json value"));
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let cfg = config::resolve(args)?;
    let (role, stats, transcript) = match args.role {
        None => {
            let (stats, transcript) = run_batch(cfg.throws, &cfg.strategies, &cfg.noise, cfg.seed)?;
            ("both", stats, transcript)
        }
        Some(r) => {
            let (role, name) = match r {
                RoleArg::Alice => (Role::Alice, "alice"),
                RoleArg::Bob => (Role::Bob, "bob"),
            };
            let party = run_party(role, &cfg)?;
            (name, party.stats, party.transcript)
        }
    };
    let report = output::build_report(&cfg, role, stats)?;
    output::write_run_outputs(&args.out, &report, &transcript)?;
    print_json(&json!({
        "out": args.out,
        "role": role,
        "throws": stats.n_throws,
        "lost": stats.n_lost,
        "failure_rate": report.rates.failures.value,
        "alice_win_rate": report.rates.alice_win.value,
        "verdict": report.verdicts.honesty.verdict,
    }));
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let mut noise = NoiseModel::ideal();
    config::apply_noise_flags(&mut noise, &args.model)?;
    noise.validate()?;
    let inner = config::cheat_kind(args.alice, None, &args.model)?
        .ok_or_else(|| CliError::usage("alice", "a sweep needs a cheating Alice"))?;
    let fractions = args
        .fractions
        .clone()
        .unwrap_or_else(|| (0..=10).map(|i| i as f64 / 10.0).collect());
    if let Some(x) = fractions.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(CliError::usage("fractions", format!("{x} is outside [0, 1]")));
    }
    if args.throws == 0 {
        return Err(CliError::usage("throws", "must be at least 1"));
    }
    let points = cheat_fraction_sweep(&fractions, &inner, &noise, args.throws, args.seed)?;
    let mut bytes = Vec::new();
    write_sweep_csv(&points, &mut bytes).map_err(|e| CliError::io("sweep.csv", io::Error::other(e)))?;
    match &args.out {
        Some(path) => fs::write(path, &bytes).map_err(|e| CliError::io(path, e)),
        None => io::stdout().write_all(&bytes).map_err(|e| CliError::io("stdout", e)),
    }
}

fn optimize(args: &OptimizeArgs) -> Result<(), CliError> {
    let config = OptimizerConfig {
        tolerance: args.tolerance,
        grid_step: args.grid_step,
        restarts: args.restarts,
        ..OptimizerConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let report = optimize_cheat_state(&config, &mut rng)
        .map_err(|e| CliError::usage("tolerance", e.to_string()))?;
    let value = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": args.seed,
        "config": config,
        "state": report.state,
        "win_prob": report.objective.win_prob,
        "objective": report.objective,
        "converged": report.converged,
        "evaluations": report.evaluations,
    });
    match &args.out {
        Some(path) => {
            let text = serde_json::to_string_pretty(&value).expect("json value") + "\n";
            fs::write(path, text).map_err(|e| CliError::io(path, e))
        }
        None => {
            print_json(&value);
            Ok(())
        }
    }
}

fn calibrate(args: &CalibrateArgs) -> Result<(), CliError> {
    let v = calibrate_visibility(args.failure_rate)
        .map_err(|e| CliError::usage("failure_rate", e.to_string()))?;
    print_json(&json!({ "failure_rate": args.failure_rate, "visibility": v }));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            let err = CliError::Usage {
                field: None,
                message: message.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string(),
            };
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Optimize(a) => optimize(a),
        Command::Calibrate(a) => calibrate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
