//! Run configuration: an optional file overlaid with command-line flags.

use std::fs;
use std::path::Path;

use qcoin_core::net::ChannelMode;
use qcoin_core::strategies::DenyTrigger;
use qcoin_core::{
    AliceConfig, BobConfig, ChannelConfig, CheatKind, MixtureParams, NoiseModel, QutritState,
    RunConfig,
};
use serde_json::Value;

use crate::args::{AliceKind, BobKind, ModelArgs, RunArgs, Trigger};
use crate::error::CliError;

/// Reads either a bare run config or a report that embeds one under `config`.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse = |source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    };
    let value: Value = serde_json::from_str(&text).map_err(parse)?;
    let inner = match value.get("config") {
        Some(c) if c.is_object() => c.clone(),
        _ => value,
    };
    serde_json::from_value(inner).map_err(parse)
}

pub fn default_optimal_state() -> QutritState {
    QutritState::from_real(2.0, 1.0, 1.0).expect("nonzero")
}

fn optimal_state(flag: &Option<Vec<f64>>) -> Result<Option<QutritState>, CliError> {
    flag.as_ref()
        .map(|v| match v[..] {
            [a, b, c] => QutritState::from_real(a, b, c)
                .map_err(|e| CliError::usage("optimal_state", e.to_string())),
            _ => Err(CliError::usage(
                "optimal_state",
                format!("expected 3 amplitudes, got {}", v.len()),
            )),
        })
        .transpose()
}

pub fn apply_noise_flags(noise: &mut NoiseModel, model: &ModelArgs) -> Result<(), CliError> {
    if let Some(v) = model.visibility {
        noise.visibility = v;
    }
    if let Some(eff) = &model.efficiencies {
        noise.detector_efficiency = eff.as_slice().try_into().map_err(|_| {
            CliError::usage("efficiencies", format!("expected 6 values, got {}", eff.len()))
        })?;
    }
    Ok(())
}

/// Builds the cheat named by `kind`, starting from `base` where it matches.
pub fn cheat_kind(
    kind: AliceKind,
    base: Option<CheatKind>,
    model: &ModelArgs,
) -> Result<Option<CheatKind>, CliError> {
    let mixture_flags = model.mixture_weight.is_some() || model.mixture_coherence.is_some();
    match kind {
        AliceKind::Honest => {
            if mixture_flags || model.optimal_state.is_some() {
                return Err(CliError::usage("alice", "cheat parameters given for an honest Alice"));
            }
            Ok(None)
        }
        AliceKind::Mixture => {
            if model.optimal_state.is_some() {
                return Err(CliError::usage("optimal_state", "only applies to --alice optimal"));
            }
            let mut params = match base {
                Some(CheatKind::Mixture(p)) => p,
                _ => MixtureParams::default(),
            };
            if let Some(w) = model.mixture_weight {
                params.weight = w;
            }
            if let Some(c) = model.mixture_coherence {
                params.coherence = c;
            }
            Ok(Some(CheatKind::Mixture(params)))
        }
        AliceKind::Optimal => {
            if mixture_flags {
                return Err(CliError::usage("mixture_weight", "only applies to --alice mixture"));
            }
            let state = match (optimal_state(&model.optimal_state)?, base) {
                (Some(s), _) => s,
                (None, Some(CheatKind::Optimal { state })) => state,
                _ => default_optimal_state(),
            };
            Ok(Some(CheatKind::Optimal { state }))
        }
    }
}

fn split_alice(alice: &AliceConfig) -> (AliceKind, Option<CheatKind>, Option<f64>) {
    match *alice {
        AliceConfig::Honest => (AliceKind::Honest, None, None),
        AliceConfig::MixtureCheat(p) => (AliceKind::Mixture, Some(CheatKind::Mixture(p)), None),
        AliceConfig::OptimalCheat { state } => {
            (AliceKind::Optimal, Some(CheatKind::Optimal { state }), None)
        }
        AliceConfig::CheatFraction { fraction, inner } => {
            let kind = match inner {
                CheatKind::Mixture(_) => AliceKind::Mixture,
                CheatKind::Optimal { .. } => AliceKind::Optimal,
            };
            (kind, Some(inner), Some(fraction))
        }
    }
}

fn merge_alice(base: &AliceConfig, args: &RunArgs) -> Result<AliceConfig, CliError> {
    let (base_kind, base_cheat, base_fraction) = split_alice(base);
    let kind = args.alice.unwrap_or(base_kind);
    let cheat = cheat_kind(kind, base_cheat, &args.model)?;
    // a fraction from the file is dropped when the flags switch Alice to honest
    let fraction = args
        .cheat_fraction
        .or(base_fraction.filter(|_| cheat.is_some()));
    Ok(match (cheat, fraction) {
        (None, Some(_)) => {
            return Err(CliError::usage(
                "cheat_fraction",
                "needs a cheating Alice (--alice mixture or optimal)",
            ))
        }
        (None, None) => AliceConfig::Honest,
        (Some(inner), Some(fraction)) => AliceConfig::CheatFraction { fraction, inner },
        (Some(CheatKind::Mixture(p)), None) => AliceConfig::MixtureCheat(p),
        (Some(CheatKind::Optimal { state }), None) => AliceConfig::OptimalCheat { state },
    })
}

fn merge_bob(base: &BobConfig, args: &RunArgs) -> Result<BobConfig, CliError> {
    let base_kind = match base {
        BobConfig::Honest => BobKind::Honest,
        BobConfig::MeasureEarly => BobKind::MeasureEarly,
        BobConfig::DenyLoss { .. } => BobKind::DenyLoss,
    };
    let kind = args.bob.unwrap_or(base_kind);
    let deny_flags = args.deny_prob.is_some() || args.deny_trigger.is_some();
    Ok(match kind {
        BobKind::DenyLoss => {
            let (mut probability, mut trigger) = match *base {
                BobConfig::DenyLoss { probability, trigger } => (probability, trigger),
                _ => (1.0, DenyTrigger::default()),
            };
            if let Some(p) = args.deny_prob {
                probability = p;
            }
            if let Some(t) = args.deny_trigger {
                trigger = match t {
                    Trigger::LostBet => DenyTrigger::LostBet,
                    Trigger::Failure => DenyTrigger::Failure,
                };
            }
            BobConfig::DenyLoss { probability, trigger }
        }
        _ if deny_flags => {
            return Err(CliError::usage("deny_prob", "only applies to --bob deny-loss"));
        }
        BobKind::Honest => BobConfig::Honest,
        BobKind::MeasureEarly => BobConfig::MeasureEarly,
    })
}

fn parse_endpoint(field: &str, text: &str) -> Result<(String, u16), CliError> {
    let (host, port) = text
        .rsplit_once(':')
        .ok_or_else(|| CliError::usage(field, format!("expected HOST:PORT, got {text:?}")))?;
    let port = port
        .parse()
        .map_err(|_| CliError::usage(field, format!("bad port in {text:?}")))?;
    let host = host.trim_start_matches('[').trim_end_matches(']');
    Ok((host.to_string(), port))
}

fn merge_channel(base: &ChannelConfig, args: &RunArgs) -> Result<ChannelConfig, CliError> {
    let mut channel = base.clone();
    if let Some(text) = &args.listen {
        let (address, port) = parse_endpoint("listen", text)?;
        channel.mode = ChannelMode::Listen { address, port };
    }
    if let Some(text) = &args.connect {
        let (address, port) = parse_endpoint("connect", text)?;
        channel.mode = ChannelMode::Connect { address, port };
    }
    if let Some(t) = args.timeout_ms {
        channel.timeout_ms = t;
    }
    Ok(channel)
}

/// File config (if any) with every given flag applied on top, validated.
pub fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = args.throws {
        cfg.throws = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    apply_noise_flags(&mut cfg.noise, &args.model)?;
    cfg.strategies.alice = merge_alice(&cfg.strategies.alice, args)?;
    cfg.strategies.bob = merge_bob(&cfg.strategies.bob, args)?;
    cfg.channel = merge_channel(&cfg.channel, args)?;
    cfg.validate()?;

    let socket = cfg.channel.mode != ChannelMode::InProcess;
    match (args.role.is_some(), socket) {
        (true, false) => Err(CliError::usage("role", "--role needs --listen or --connect")),
        (false, true) => Err(CliError::usage("role", "socket runs need --role alice or --role bob")),
        _ => Ok(cfg),
    }
}
