use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AliceStrategy;
use crate::config::ConfigError;
use crate::optimizer::cheat_win_probability;
use crate::protocol::PartyRng;
use crate::qutrit::{canonical_state, Coin, QutritState, StateLabel};

/// What Alice will announce once she hears the bet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimPlan {
    Truthful(StateLabel),
    /// Claim a state of the coin opposite to the bet. Depends on the bet
    /// only, so nothing about the prepared photon needs to be remembered.
    AgainstBet {
        against_heads: StateLabel,
        against_tails: StateLabel,
    },
}

impl ClaimPlan {
    pub fn claim(&self, bet: Coin) -> StateLabel {
        match *self {
            ClaimPlan::Truthful(label) => label,
            ClaimPlan::AgainstBet { against_heads, .. } if bet == Coin::Heads => against_heads,
            ClaimPlan::AgainstBet { against_tails, .. } => against_tails,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Preparation {
    pub payload: QutritState,
    pub plan: ClaimPlan,
}

/// Uniform over the four states, truthful reveal.
#[derive(Clone, Copy, Debug, Default)]
pub struct HonestAlice;

impl AliceStrategy for HonestAlice {
    fn name(&self) -> &'static str {
        "honest"
    }

    fn prepare(&mut self, rng: &mut PartyRng) -> Preparation {
        let label = StateLabel::ALL[rng.random_range(0..4)];
        Preparation {
            payload: canonical_state(label),
            plan: ClaimPlan::Truthful(label),
        }
    }
}

/// Imperfections of the mixture cheat.
///
/// `weight` is the probability of sending A12 rather than A21. `coherence`
/// is the fraction of throws on which the two arms emit the superposition
/// `√w·A12 ± √(1−w)·A21` instead of one of the two states, with the sign of
/// `coherence` selecting the relative phase. The ideal cheat is
/// `weight = 0.5, coherence = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    #[serde(default = "half")]
    pub weight: f64,
    #[serde(default)]
    pub coherence: f64,
}

fn half() -> f64 {
    0.5
}

impl Default for MixtureParams {
    fn default() -> Self {
        MixtureParams {
            weight: 0.5,
            coherence: 0.0,
        }
    }
}

impl MixtureParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.weight) {
            return Err(ConfigError::invalid("mixture.weight", "must lie in [0, 1]"));
        }
        if !(-1.0..=1.0).contains(&self.coherence) {
            return Err(ConfigError::invalid("mixture.coherence", "must lie in [-1, 1]"));
        }
        Ok(())
    }
}

/// Sends A12 or A21 and always claims the coin Bob did not bet on:
/// A12 against a tails bet, A21 against a heads bet.
#[derive(Clone, Debug)]
pub struct MixtureCheatAlice {
    params: MixtureParams,
    coherent: [QutritState; 2],
}

impl MixtureCheatAlice {
    pub const PLAN: ClaimPlan = ClaimPlan::AgainstBet {
        against_heads: StateLabel::A21,
        against_tails: StateLabel::A12,
    };

    pub fn new(params: MixtureParams) -> Result<Self, ConfigError> {
        params.validate()?;
        let a = canonical_state(StateLabel::A12).amplitudes();
        let b = canonical_state(StateLabel::A21).amplitudes();
        let (wa, wb) = (params.weight.sqrt(), (1.0 - params.weight).sqrt());
        let superpose = |sign: f64| {
            QutritState::normalized([0, 1, 2].map(|k| a[k] * wa + b[k] * (sign * wb)))
                .expect("A12 and A21 are linearly independent")
        };
        Ok(MixtureCheatAlice {
            params,
            coherent: [superpose(1.0), superpose(-1.0)],
        })
    }

    pub fn ideal() -> Self {
        Self::new(MixtureParams::default()).expect("default params are valid")
    }
}

impl AliceStrategy for MixtureCheatAlice {
    fn name(&self) -> &'static str {
        "mixture_cheat"
    }

    fn prepare(&mut self, rng: &mut PartyRng) -> Preparation {
        let c = self.params.coherence;
        let payload = if c != 0.0 && rng.random::<f64>() < c.abs() {
            self.coherent[usize::from(c < 0.0)]
        } else if rng.random::<f64>() < self.params.weight {
            canonical_state(StateLabel::A12)
        } else {
            canonical_state(StateLabel::A21)
        };
        Preparation {
            payload,
            plan: Self::PLAN,
        }
    }
}

/// Always sends one fixed state and claims the best-overlapping state of
/// the coin opposite to the bet.
#[derive(Clone, Debug)]
pub struct OptimalCheatAlice {
    state: QutritState,
    plan: ClaimPlan,
}

impl OptimalCheatAlice {
    pub fn new(state: QutritState) -> Self {
        let objective = cheat_win_probability(&state);
        OptimalCheatAlice {
            state,
            plan: ClaimPlan::AgainstBet {
                against_heads: objective.claim_against_heads,
                against_tails: objective.claim_against_tails,
            },
        }
    }

    pub fn state(&self) -> &QutritState {
        &self.state
    }

    pub fn plan(&self) -> ClaimPlan {
        self.plan
    }
}

impl AliceStrategy for OptimalCheatAlice {
    fn name(&self) -> &'static str {
        "optimal_cheat"
    }

    fn prepare(&mut self, _rng: &mut PartyRng) -> Preparation {
        Preparation {
            payload: self.state,
            plan: self.plan,
        }
    }
}

/// Cheats on a Bernoulli(`fraction`) subset of throws, honest otherwise.
pub struct CheatFractionAlice {
    fraction: f64,
    honest: HonestAlice,
    inner: Box<dyn AliceStrategy>,
}

impl CheatFractionAlice {
    pub fn new(fraction: f64, inner: Box<dyn AliceStrategy>) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(ConfigError::invalid("cheat_fraction", "must lie in [0, 1]"));
        }
        Ok(CheatFractionAlice {
            fraction,
            honest: HonestAlice,
            inner,
        })
    }
}

impl AliceStrategy for CheatFractionAlice {
    fn name(&self) -> &'static str {
        "cheat_fraction"
    }

    fn prepare(&mut self, rng: &mut PartyRng) -> Preparation {
        if rng.random::<f64>() < self.fraction {
            self.inner.prepare(rng)
        } else {
            self.honest.prepare(rng)
        }
    }
}
