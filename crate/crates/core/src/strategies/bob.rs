use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BobStrategy;
use crate::config::ConfigError;
use crate::protocol::{verdict_for, EarlyProbe, MessageKind, PartyRng, Verdict};
use crate::qutrit::{Coin, Detection, StateLabel};

/// What Bob knows when deciding how to report a throw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerificationView {
    pub throw_id: u64,
    pub bet: Coin,
    pub claim: StateLabel,
    /// `None` when the photon was routed to the other basis.
    pub detection: Option<Detection>,
}

impl VerificationView {
    /// The verdict a truthful report would produce.
    pub fn honest_verdict(&self) -> Verdict {
        match self.detection {
            Some(Detection::Click(o)) => {
                verdict_for(self.claim, &MessageKind::Verify(o)).unwrap_or(Verdict::Failure)
            }
            _ => Verdict::Lost,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Report {
    Acknowledge,
    /// Report LOST regardless of the click.
    Deny,
}

fn fair_bet(rng: &mut PartyRng) -> Coin {
    if rng.random_bool(0.5) {
        Coin::Heads
    } else {
        Coin::Tails
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct HonestBob;

impl BobStrategy for HonestBob {
    fn name(&self) -> &'static str {
        "honest"
    }

    fn bet(&mut self, _probe: &mut EarlyProbe<'_>, rng: &mut PartyRng) -> Coin {
        fair_bet(rng)
    }
}

/// Measures the photon in `{|0⟩, |1⟩, |2⟩}` before betting: `|1⟩` only
/// occurs for heads states, `|2⟩` only for tails states, `|0⟩` is
/// uninformative. This reaches the Helstrom bound for the two set mixtures.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeasureEarlyBob;

impl BobStrategy for MeasureEarlyBob {
    fn name(&self) -> &'static str {
        "measure_early"
    }

    fn bet(&mut self, probe: &mut EarlyProbe<'_>, rng: &mut PartyRng) -> Coin {
        match probe.measure_computational() {
            1 => Coin::Heads,
            2 => Coin::Tails,
            _ => fair_bet(rng),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenyTrigger {
    /// Deny correct measurements of a lost bet.
    #[default]
    LostBet,
    /// Deny failure verdicts instead.
    Failure,
}

/// Bets fairly, then hides outcomes he dislikes by reporting them lost.
#[derive(Clone, Copy, Debug)]
pub struct DenyLossBob {
    probability: f64,
    trigger: DenyTrigger,
}

impl DenyLossBob {
    pub fn new(probability: f64, trigger: DenyTrigger) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(ConfigError::invalid("deny_probability", "must lie in [0, 1]"));
        }
        Ok(DenyLossBob {
            probability,
            trigger,
        })
    }

    fn triggered(&self, view: &VerificationView) -> bool {
        match (self.trigger, view.honest_verdict()) {
            (DenyTrigger::LostBet, Verdict::Success(coin)) => coin != view.bet,
            (DenyTrigger::Failure, Verdict::Failure) => true,
            _ => false,
        }
    }
}

impl BobStrategy for DenyLossBob {
    fn name(&self) -> &'static str {
        "deny_loss"
    }

    fn bet(&mut self, _probe: &mut EarlyProbe<'_>, rng: &mut PartyRng) -> Coin {
        fair_bet(rng)
    }

    fn report(&mut self, view: &VerificationView, rng: &mut PartyRng) -> Report {
        if self.triggered(view) && rng.random_bool(self.probability) {
            Report::Deny
        } else {
            Report::Acknowledge
        }
    }
}
