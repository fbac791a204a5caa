//! Alice and Bob session state machines.
//!
//! Each throw runs `THROW → BET → REVEAL → VERIFY | LOST`, or `THROW → LOST`
//! when Bob refuses the photon. A lost throw is discarded and the driver
//! starts a fresh throw with a new preparation.
//!
//! # Random streams
//!
//! Every run derives three ChaCha8 streams from one 64-bit seed, in this
//! fixed assignment:
//!
//! | stream | owner | draws per throw |
//! |---|---|---|
//! | 0 | Alice's strategy | preparation (and cheat-fraction coin) |
//! | 1 | Bob's strategy | bet, loss-denial coin |
//! | 2 | Bob's apparatus | basis routing at THROW, early probe click, verification click |
//!
//! Replaying a seed therefore reproduces the transcript exactly, whether the
//! two sessions run in one loop, on two threads, or in two processes.
//!
//! The photon travels inside THROW but only [`Apparatus`] reads it. This is a
//! module-boundary trust model for simulation; it is not cryptographic.

mod message;
mod session;
mod transcript;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use message::{Direction, KindTag, MessageKind, Payload, ProtocolMessage};
pub use session::{
    close_throw, play_throw, AliceSession, AliceStep, Apparatus, BobReply, BobSession, EarlyProbe,
};
pub use transcript::{
    validate_partial_transcript, validate_transcript, verdict_for, ThrowRecord, Transcript,
    TranscriptEntry, Verdict, Violation,
};

use crate::qutrit::{OutcomeLabel, QutritError, StateLabel};

pub type PartyRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stream {
    Alice = 0,
    Bob = 1,
    Apparatus = 2,
}

pub(crate) fn party_rng(seed: u64, stream: Stream) -> PartyRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("throw {0} is still open")]
    ThrowAlreadyOpen(u64),
    #[error("throw {throw_id}: {kind} received with no open throw")]
    NoOpenThrow { throw_id: u64, kind: KindTag },
    #[error("throw {throw_id}: {kind} out of order after {state}")]
    UnexpectedMessage {
        throw_id: u64,
        kind: KindTag,
        state: &'static str,
    },
    #[error("throw {got}: expected throw id {expected}")]
    WrongThrowId { expected: u64, got: u64 },
    #[error("throw {throw_id}: outcome {outcome} is not in the basis of claim {claim}")]
    IllegalOutcome {
        throw_id: u64,
        outcome: OutcomeLabel,
        claim: StateLabel,
    },
    #[error(transparent)]
    Qutrit(#[from] QutritError),
}

impl ProtocolError {
    pub fn throw_id(&self) -> Option<u64> {
        match self {
            ProtocolError::ThrowAlreadyOpen(id) => Some(*id),
            ProtocolError::NoOpenThrow { throw_id, .. }
            | ProtocolError::UnexpectedMessage { throw_id, .. }
            | ProtocolError::IllegalOutcome { throw_id, .. } => Some(*throw_id),
            ProtocolError::WrongThrowId { got, .. } => Some(*got),
            ProtocolError::Qutrit(_) => None,
        }
    }
}
