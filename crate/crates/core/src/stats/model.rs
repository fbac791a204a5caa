//! Closed-form expectations for Alice strategies against an honest Bob.
//!
//! Each Alice strategy is expanded into its preparation ensemble, then every
//! (preparation, bet, outcome) branch is weighted exactly. Rates are
//! conditioned on the throw being kept, as in the simulator.

use serde::{Deserialize, Serialize};

use crate::qutrit::{born_probabilities, canonical_state, depolarize, Coin, NoiseModel, QutritState, StateLabel};
use crate::strategies::{AliceConfig, CheatKind, ClaimPlan, MixtureCheatAlice, MixtureParams, OptimalCheatAlice};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedRates {
    pub failure: f64,
    pub alice_win: f64,
}

fn ensemble(alice: &AliceConfig) -> Vec<(f64, QutritState, ClaimPlan)> {
    match alice {
        AliceConfig::Honest => StateLabel::ALL
            .iter()
            .map(|l| (0.25, canonical_state(*l), ClaimPlan::Truthful(*l)))
            .collect(),
        AliceConfig::MixtureCheat(params) => mixture_ensemble(params),
        AliceConfig::OptimalCheat { state } => {
            vec![(1.0, *state, OptimalCheatAlice::new(*state).plan())]
        }
        AliceConfig::CheatFraction { fraction, inner } => {
            let mut out: Vec<_> = ensemble(&AliceConfig::Honest)
                .into_iter()
                .map(|(w, s, p)| ((1.0 - fraction) * w, s, p))
                .collect();
            out.extend(
                ensemble(&cheat_config(inner))
                    .into_iter()
                    .map(|(w, s, p)| (fraction * w, s, p)),
            );
            out
        }
    }
}

fn cheat_config(kind: &CheatKind) -> AliceConfig {
    match kind {
        CheatKind::Mixture(p) => AliceConfig::MixtureCheat(*p),
        CheatKind::Optimal { state } => AliceConfig::OptimalCheat { state: *state },
    }
}

fn mixture_ensemble(params: &MixtureParams) -> Vec<(f64, QutritState, ClaimPlan)> {
    let plan = MixtureCheatAlice::PLAN;
    let c = params.coherence.abs();
    let a = canonical_state(StateLabel::A12).amplitudes();
    let b = canonical_state(StateLabel::A21).amplitudes();
    let sign = if params.coherence < 0.0 { -1.0 } else { 1.0 };
    let (wa, wb) = (params.weight.sqrt(), (1.0 - params.weight).sqrt() * sign);
    let coherent = QutritState::normalized([0, 1, 2].map(|k| a[k] * wa + b[k] * wb))
        .expect("independent states");
    vec![
        ((1.0 - c) * params.weight, canonical_state(StateLabel::A12), plan),
        ((1.0 - c) * (1.0 - params.weight), canonical_state(StateLabel::A21), plan),
        (c, coherent, plan),
    ]
}

/// Failure and Alice-win rates among kept throws.
pub fn expected_rates(alice: &AliceConfig, noise: &NoiseModel) -> ExpectedRates {
    let (mut kept, mut failed, mut alice_won) = (0.0, 0.0, 0.0);
    for (w, state, plan) in ensemble(alice) {
        let rho = depolarize(&state.projector(), noise.visibility);
        for bet in Coin::ALL {
            let claim = plan.claim(bet);
            let basis = claim.basis();
            let probs = born_probabilities(&rho, basis);
            let eff = noise.efficiencies(basis);
            let matching = claim.matching_outcome().slot();
            for slot in 0..3 {
                let mass = 0.5 * w * probs[slot] * eff[slot];
                kept += mass;
                if slot == matching {
                    if claim.coin() != bet {
                        alice_won += mass;
                    }
                } else {
                    failed += mass;
                }
            }
        }
    }
    ExpectedRates {
        failure: failed / kept,
        alice_win: alice_won / kept,
    }
}

pub fn cheat_rates(kind: &CheatKind, noise: &NoiseModel) -> ExpectedRates {
    expected_rates(&cheat_config(kind), noise)
}

/// Expected share of Basis1-claim failures that click B13.
pub fn out_of_plane_share(alice: &AliceConfig, noise: &NoiseModel) -> f64 {
    let (mut fail, mut out) = (0.0, 0.0);
    for (w, state, plan) in ensemble(alice) {
        let rho = depolarize(&state.projector(), noise.visibility);
        for bet in Coin::ALL {
            let claim = plan.claim(bet);
            if claim.coin() != Coin::Heads {
                continue;
            }
            let probs = born_probabilities(&rho, claim.basis());
            let eff = noise.efficiencies(claim.basis());
            for slot in 0..3 {
                if slot != claim.matching_outcome().slot() {
                    let mass = w * probs[slot] * eff[slot];
                    fail += mass;
                    if slot == 2 {
                        out += mass;
                    }
                }
            }
        }
    }
    out / fail
}
