//! Party behaviors plugged into the protocol sessions.
//!
//! Alice strategies choose the photon and a claim plan; Bob strategies
//! choose a bet and decide what to report after verification. Bob's only
//! access to the photon is the [`EarlyProbe`] handed to
//! [`BobStrategy::bet`].

mod alice;
mod bob;
mod config;

pub use alice::{
    CheatFractionAlice, ClaimPlan, HonestAlice, MixtureCheatAlice, MixtureParams,
    OptimalCheatAlice, Preparation,
};
pub use bob::{DenyLossBob, DenyTrigger, HonestBob, MeasureEarlyBob, Report, VerificationView};
pub use config::{AliceConfig, BobConfig, CheatKind, StrategyConfig};

use crate::protocol::{EarlyProbe, PartyRng};
use crate::qutrit::Coin;

pub trait AliceStrategy: Send {
    fn name(&self) -> &'static str;

    /// Picks the photon to send and how to answer each possible bet.
    fn prepare(&mut self, rng: &mut PartyRng) -> Preparation;
}

pub trait BobStrategy: Send {
    fn name(&self) -> &'static str;

    fn bet(&mut self, probe: &mut EarlyProbe<'_>, rng: &mut PartyRng) -> Coin;

    fn report(&mut self, _view: &VerificationView, _rng: &mut PartyRng) -> Report {
        Report::Acknowledge
    }
}
