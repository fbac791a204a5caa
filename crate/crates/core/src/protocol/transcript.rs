use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::message::{Direction, KindTag, MessageKind, ProtocolMessage};
use crate::qutrit::{Coin, OutcomeLabel, StateLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Success(Coin),
    Failure,
    Lost,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Success(_) => "success",
            Verdict::Failure => "failure",
            Verdict::Lost => "lost",
        }
    }
}

/// Outcome of one throw as seen by either party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThrowRecord {
    pub throw_id: u64,
    pub claim: Option<StateLabel>,
    pub bet: Option<Coin>,
    pub outcome: Option<OutcomeLabel>,
    pub verdict: Verdict,
}

impl ThrowRecord {
    /// Kept throws are the ones not discarded as lost.
    pub fn is_kept(&self) -> bool {
        self.verdict != Verdict::Lost
    }

    /// Whether Bob's bet named the coin Alice revealed.
    pub fn bet_matches_claim(&self) -> Option<bool> {
        Some(self.bet? == self.claim?.coin())
    }

    /// A verified throw whose coin is the opposite of Bob's bet.
    pub fn alice_wins(&self) -> bool {
        matches!((self.verdict, self.bet), (Verdict::Success(c), Some(b)) if c != b)
    }

    pub fn bob_wins(&self) -> bool {
        matches!((self.verdict, self.bet), (Verdict::Success(c), Some(b)) if c == b)
    }
}

/// Computes the verdict of a throw from its terminal message.
pub fn verdict_for(claim: StateLabel, terminal: &MessageKind) -> Option<Verdict> {
    match terminal {
        MessageKind::Lost => Some(Verdict::Lost),
        MessageKind::Verify(o) if *o == claim.matching_outcome() => {
            Some(Verdict::Success(claim.coin()))
        }
        MessageKind::Verify(o) if o.basis() == claim.basis() => Some(Verdict::Failure),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranscriptEntry {
    pub direction: Direction,
    pub message: ProtocolMessage,
    /// Logical clock, one tick per message.
    pub timestamp: u64,
}

/// Append-only message log plus the per-throw records derived from it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
    records: Vec<ThrowRecord>,
    clock: u64,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_message(&mut self, direction: Direction, message: ProtocolMessage) {
        self.entries.push(TranscriptEntry {
            direction,
            message,
            timestamp: self.clock,
        });
        self.clock += 1;
    }

    pub fn push_record(&mut self, record: ThrowRecord) {
        self.records.push(record);
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn records(&self) -> &[ThrowRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ThrowRecord> {
        self.records
    }

    /// Records as JSON lines, the canonical byte form used for cross-transport comparison.
    pub fn records_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateThrowId(u64),
    NonMonotonicThrowId { throw_id: u64, previous: u64 },
    RevealBeforeBet(u64),
    OutOfOrder { throw_id: u64, kind: KindTag, after: &'static str },
    WrongDirection { throw_id: u64, kind: KindTag },
    Unterminated(u64),
    VerdictMismatch(u64),
}

impl Violation {
    pub fn throw_id(&self) -> u64 {
        match self {
            Violation::DuplicateThrowId(id)
            | Violation::RevealBeforeBet(id)
            | Violation::Unterminated(id)
            | Violation::VerdictMismatch(id) => *id,
            Violation::NonMonotonicThrowId { throw_id, .. }
            | Violation::OutOfOrder { throw_id, .. }
            | Violation::WrongDirection { throw_id, .. } => *throw_id,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateThrowId(id) => write!(f, "throw {id}: duplicate throw id"),
            Violation::NonMonotonicThrowId { throw_id, previous } => {
                write!(f, "throw {throw_id}: id not above previous throw {previous}")
            }
            Violation::RevealBeforeBet(id) => write!(f, "throw {id}: REVEAL before BET"),
            Violation::OutOfOrder {
                throw_id,
                kind,
                after,
            } => write!(f, "throw {throw_id}: {kind} not allowed after {after}"),
            Violation::WrongDirection { throw_id, kind } => {
                write!(f, "throw {throw_id}: {kind} sent by the wrong party")
            }
            Violation::Unterminated(id) => write!(f, "throw {id}: unterminated throw"),
            Violation::VerdictMismatch(id) => {
                write!(f, "throw {id}: recorded verdict disagrees with its messages")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Thrown,
    Bet,
    Revealed,
    Closed,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Thrown => "THROW",
            Stage::Bet => "BET",
            Stage::Revealed => "REVEAL",
            Stage::Closed => "a terminal message",
        }
    }
}

/// Checks every throw id for a legal message order:
/// `THROW→BET→REVEAL→VERIFY`, `THROW→BET→REVEAL→LOST` or `THROW→LOST`.
pub fn validate_transcript(transcript: &Transcript) -> Result<(), Vec<Violation>> {
    validate(transcript, false)
}

/// As [`validate_transcript`], but tolerates the last opened throw being
/// unterminated (a session aborted mid-throw).
pub fn validate_partial_transcript(transcript: &Transcript) -> Result<(), Vec<Violation>> {
    validate(transcript, true)
}

fn validate(transcript: &Transcript, allow_open_tail: bool) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut stages: BTreeMap<u64, Stage> = BTreeMap::new();
    let mut last_opened: Option<u64> = None;

    for entry in transcript.entries() {
        let id = entry.message.throw_id;
        let kind = entry.message.tag();
        if kind.direction() != entry.direction {
            violations.push(Violation::WrongDirection { throw_id: id, kind });
        }
        let stage = stages.get(&id).copied();
        let next = match (stage, kind) {
            (None, KindTag::Throw) => {
                if let Some(prev) = last_opened.filter(|prev| id <= *prev) {
                    violations.push(Violation::NonMonotonicThrowId {
                        throw_id: id,
                        previous: prev,
                    });
                }
                last_opened = Some(last_opened.map_or(id, |p| p.max(id)));
                Some(Stage::Thrown)
            }
            (Some(_), KindTag::Throw) => {
                violations.push(Violation::DuplicateThrowId(id));
                None
            }
            (None, _) => {
                violations.push(Violation::OutOfOrder {
                    throw_id: id,
                    kind,
                    after: "nothing",
                });
                None
            }
            (Some(Stage::Thrown), KindTag::Bet) => Some(Stage::Bet),
            (Some(Stage::Thrown), KindTag::Lost) => Some(Stage::Closed),
            (Some(Stage::Thrown), KindTag::Reveal) => {
                violations.push(Violation::RevealBeforeBet(id));
                Some(Stage::Revealed)
            }
            (Some(Stage::Bet), KindTag::Reveal) => Some(Stage::Revealed),
            (Some(Stage::Revealed), KindTag::Verify | KindTag::Lost) => Some(Stage::Closed),
            (Some(s), _) => {
                violations.push(Violation::OutOfOrder {
                    throw_id: id,
                    kind,
                    after: s.name(),
                });
                None
            }
        };
        if let Some(next) = next {
            stages.insert(id, next);
        }
    }

    for (&id, &stage) in &stages {
        if stage != Stage::Closed && !(allow_open_tail && Some(id) == last_opened) {
            violations.push(Violation::Unterminated(id));
        }
    }

    for record in transcript.records() {
        let consistent = match (record.claim, record.outcome, record.verdict) {
            (_, None, Verdict::Lost) => true,
            (Some(claim), Some(o), v) => verdict_for(claim, &MessageKind::Verify(o)) == Some(v),
            _ => false,
        };
        if !consistent {
            violations.push(Violation::VerdictMismatch(record.throw_id));
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
