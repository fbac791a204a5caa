use std::fmt;

use crate::qutrit::{Coin, DensityOperator, OutcomeLabel, QutritState, StateLabel};

/// The quantum half of a THROW. Only Bob's measurement apparatus reads it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Payload {
    Pure(QutritState),
    Mixed(DensityOperator),
}

impl Payload {
    pub(crate) fn density(&self) -> DensityOperator {
        match self {
            Payload::Pure(s) => s.projector(),
            Payload::Mixed(rho) => *rho,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MessageKind {
    Throw(Payload),
    Bet(Coin),
    Reveal(StateLabel),
    Verify(OutcomeLabel),
    Lost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KindTag {
    Throw,
    Bet,
    Reveal,
    Verify,
    Lost,
}

impl KindTag {
    pub const ALL: [KindTag; 5] = [
        KindTag::Throw,
        KindTag::Bet,
        KindTag::Reveal,
        KindTag::Verify,
        KindTag::Lost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KindTag::Throw => "THROW",
            KindTag::Bet => "BET",
            KindTag::Reveal => "REVEAL",
            KindTag::Verify => "VERIFY",
            KindTag::Lost => "LOST",
        }
    }

    pub fn from_name(name: &str) -> Option<KindTag> {
        KindTag::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Who is allowed to send this kind.
    pub fn direction(self) -> Direction {
        match self {
            KindTag::Throw | KindTag::Reveal => Direction::AliceToBob,
            KindTag::Bet | KindTag::Verify | KindTag::Lost => Direction::BobToAlice,
        }
    }
}

impl fmt::Display for KindTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl MessageKind {
    pub fn tag(&self) -> KindTag {
        match self {
            MessageKind::Throw(_) => KindTag::Throw,
            MessageKind::Bet(_) => KindTag::Bet,
            MessageKind::Reveal(_) => KindTag::Reveal,
            MessageKind::Verify(_) => KindTag::Verify,
            MessageKind::Lost => KindTag::Lost,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolMessage {
    pub throw_id: u64,
    pub kind: MessageKind,
}

impl ProtocolMessage {
    pub fn new(throw_id: u64, kind: MessageKind) -> Self {
        ProtocolMessage { throw_id, kind }
    }

    pub fn tag(&self) -> KindTag {
        self.kind.tag()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}
