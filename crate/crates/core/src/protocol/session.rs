use rand::Rng;

use super::message::{Direction, KindTag, MessageKind, Payload, ProtocolMessage};
use super::transcript::{verdict_for, ThrowRecord, Transcript};
use super::{party_rng, PartyRng, ProtocolError, Stream};
use crate::qutrit::{
    born_probabilities, collapse_computational, computational_probabilities, depolarize,
    sample_index, sample_outcome, BasisLabel, Coin, DensityOperator, Detection, NoiseModel,
    StateLabel,
};
use crate::strategies::{AliceStrategy, BobStrategy, ClaimPlan, Report, VerificationView};

/// Builds the record that closes a throw.
pub fn close_throw(
    throw_id: u64,
    claim: Option<StateLabel>,
    bet: Option<Coin>,
    terminal: &MessageKind,
) -> Result<ThrowRecord, ProtocolError> {
    let (outcome, verdict) = match (terminal, claim) {
        (MessageKind::Lost, _) => (None, super::Verdict::Lost),
        (MessageKind::Verify(o), Some(c)) => {
            let verdict = verdict_for(c, terminal).ok_or(ProtocolError::IllegalOutcome {
                throw_id,
                outcome: *o,
                claim: c,
            })?;
            (Some(*o), verdict)
        }
        (other, _) => {
            return Err(ProtocolError::UnexpectedMessage {
                throw_id,
                kind: other.tag(),
                state: if claim.is_some() { "REVEAL" } else { "BET" },
            })
        }
    };
    Ok(ThrowRecord {
        throw_id,
        claim,
        bet,
        outcome,
        verdict,
    })
}

#[derive(Debug)]
struct AliceOpen {
    throw_id: u64,
    plan: ClaimPlan,
    bet: Option<Coin>,
    claim: Option<StateLabel>,
}

/// What Alice does after receiving a message from Bob.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AliceStep {
    Reply(ProtocolMessage),
    Closed(ThrowRecord),
}

/// Alice's side of the protocol. One throw is open at a time.
pub struct AliceSession {
    strategy: Box<dyn AliceStrategy>,
    rng: PartyRng,
    next_id: u64,
    open: Option<AliceOpen>,
    transcript: Transcript,
    log_messages: bool,
}

impl AliceSession {
    pub fn new(strategy: Box<dyn AliceStrategy>, seed: u64) -> Self {
        AliceSession {
            strategy,
            rng: party_rng(seed, Stream::Alice),
            next_id: 0,
            open: None,
            transcript: Transcript::new(),
            log_messages: true,
        }
    }

    /// Keeps only throw records, not individual messages.
    pub fn without_message_log(mut self) -> Self {
        self.log_messages = false;
        self
    }

    pub fn strategy_name(&self) -> &'static str {
        self.strategy.name()
    }

    pub fn has_open_throw(&self) -> bool {
        self.open.is_some()
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    fn log(&mut self, direction: Direction, message: ProtocolMessage) {
        if self.log_messages {
            self.transcript.push_message(direction, message);
        }
    }

    /// Prepares a state and emits THROW. The claim plan stays private.
    pub fn begin_throw(&mut self) -> Result<ProtocolMessage, ProtocolError> {
        if let Some(open) = &self.open {
            return Err(ProtocolError::ThrowAlreadyOpen(open.throw_id));
        }
        let prep = self.strategy.prepare(&mut self.rng);
        let throw_id = self.next_id;
        self.next_id += 1;
        self.open = Some(AliceOpen {
            throw_id,
            plan: prep.plan,
            bet: None,
            claim: None,
        });
        let msg = ProtocolMessage::new(throw_id, MessageKind::Throw(Payload::Pure(prep.payload)));
        self.log(Direction::AliceToBob, msg);
        Ok(msg)
    }

    /// Handles BET (answering with REVEAL) or a terminal VERIFY/LOST.
    pub fn receive(&mut self, msg: ProtocolMessage) -> Result<AliceStep, ProtocolError> {
        let Some(open) = self.open.as_mut() else {
            return Err(ProtocolError::NoOpenThrow {
                throw_id: msg.throw_id,
                kind: msg.tag(),
            });
        };
        if msg.throw_id != open.throw_id {
            return Err(ProtocolError::WrongThrowId {
                expected: open.throw_id,
                got: msg.throw_id,
            });
        }
        match (msg.kind, open.bet) {
            (MessageKind::Bet(bet), None) => {
                open.bet = Some(bet);
                let claim = open.plan.claim(bet);
                open.claim = Some(claim);
                let reply = ProtocolMessage::new(open.throw_id, MessageKind::Reveal(claim));
                self.log(Direction::BobToAlice, msg);
                self.log(Direction::AliceToBob, reply);
                Ok(AliceStep::Reply(reply))
            }
            (MessageKind::Lost, None) | (MessageKind::Verify(_) | MessageKind::Lost, Some(_)) => {
                let record = close_throw(open.throw_id, open.claim, open.bet, &msg.kind)?;
                self.open = None;
                self.log(Direction::BobToAlice, msg);
                self.transcript.push_record(record);
                Ok(AliceStep::Closed(record))
            }
            (kind, bet) => Err(ProtocolError::UnexpectedMessage {
                throw_id: msg.throw_id,
                kind: kind.tag(),
                state: if bet.is_some() { "REVEAL" } else { "THROW" },
            }),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Held {
    Noisy(DensityOperator),
    Collapsed(DensityOperator),
}

/// Bob's detector bench: holds the photon, routes it to one of the two
/// bases, and samples clicks. Strategy code never sees the payload.
pub struct Apparatus {
    noise: NoiseModel,
    rng: PartyRng,
    held: Option<Held>,
    basis: BasisLabel,
}

impl Apparatus {
    fn new(noise: NoiseModel, seed: u64) -> Self {
        Apparatus {
            noise,
            rng: party_rng(seed, Stream::Apparatus),
            held: None,
            basis: BasisLabel::Basis1,
        }
    }

    /// Applies channel noise and fixes the routing basis for this photon.
    fn load(&mut self, payload: &Payload) {
        self.basis = if self.rng.random_bool(0.5) {
            BasisLabel::Basis1
        } else {
            BasisLabel::Basis2
        };
        self.held = Some(Held::Noisy(depolarize(
            &payload.density(),
            self.noise.visibility,
        )));
    }

    fn density(&self) -> Option<DensityOperator> {
        self.held.map(|h| match h {
            Held::Noisy(rho) | Held::Collapsed(rho) => rho,
        })
    }

    /// Measures the held photon in `{|0⟩, |1⟩, |2⟩}` and collapses it.
    fn measure_computational(&mut self) -> usize {
        let rho = self.density().expect("probe used without a loaded photon");
        let probs = computational_probabilities(&rho);
        let level = sample_index(&probs, &[1.0; 3], &mut self.rng)
            .unwrap_or_else(|| (0..3).rev().find(|k| probs[*k] > 0.0).unwrap_or(0));
        let collapsed = collapse_computational(&rho, level)
            .expect("sampled level has positive probability");
        self.held = Some(Held::Collapsed(collapsed.projector()));
        level
    }

    /// `None` when the photon went to the other basis.
    fn verify(&mut self, claim_basis: BasisLabel) -> Option<Detection> {
        let rho = self.held.take().map(|h| match h {
            Held::Noisy(rho) | Held::Collapsed(rho) => rho,
        })?;
        if claim_basis != self.basis {
            return None;
        }
        let probs = born_probabilities(&rho, claim_basis);
        Some(sample_outcome(
            &probs,
            &self.noise.efficiencies(claim_basis),
            claim_basis,
            &mut self.rng,
        ))
    }
}

/// The only handle a Bob strategy gets on the photon before REVEAL.
pub struct EarlyProbe<'a> {
    apparatus: &'a mut Apparatus,
    used: bool,
}

impl EarlyProbe<'_> {
    /// Measures in the computational basis and returns the level `0..3`.
    /// The photon is collapsed; a second call returns the same level.
    pub fn measure_computational(&mut self) -> usize {
        if self.used {
            let rho = self.apparatus.density().expect("loaded photon");
            return (0..3)
                .find(|k| rho.matrix()[(*k, *k)].re > 0.5)
                .expect("collapsed onto a level");
        }
        self.used = true;
        self.apparatus.measure_computational()
    }

    pub fn was_used(&self) -> bool {
        self.used
    }
}

#[derive(Debug)]
struct BobOpen {
    throw_id: u64,
    bet: Option<Coin>,
}

/// Bob's reply to an incoming message, with the record if it closed the throw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BobReply {
    pub message: ProtocolMessage,
    pub record: Option<ThrowRecord>,
}

/// Bob's side of the protocol.
pub struct BobSession {
    strategy: Box<dyn BobStrategy>,
    rng: PartyRng,
    apparatus: Apparatus,
    open: Option<BobOpen>,
    last_id: Option<u64>,
    transcript: Transcript,
    log_messages: bool,
}

impl BobSession {
    pub fn new(strategy: Box<dyn BobStrategy>, noise: NoiseModel, seed: u64) -> Self {
        BobSession {
            strategy,
            rng: party_rng(seed, Stream::Bob),
            apparatus: Apparatus::new(noise, seed),
            open: None,
            last_id: None,
            transcript: Transcript::new(),
            log_messages: true,
        }
    }

    pub fn without_message_log(mut self) -> Self {
        self.log_messages = false;
        self
    }

    pub fn strategy_name(&self) -> &'static str {
        self.strategy.name()
    }

    pub fn has_open_throw(&self) -> bool {
        self.open.is_some()
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    fn log(&mut self, direction: Direction, message: ProtocolMessage) {
        if self.log_messages {
            self.transcript.push_message(direction, message);
        }
    }

    fn check_new_throw(&self, msg: &ProtocolMessage) -> Result<(), ProtocolError> {
        if let Some(open) = &self.open {
            return Err(ProtocolError::UnexpectedMessage {
                throw_id: msg.throw_id,
                kind: msg.tag(),
                state: if open.bet.is_some() { "BET" } else { "THROW" },
            });
        }
        if let Some(last) = self.last_id.filter(|last| msg.throw_id <= *last) {
            return Err(ProtocolError::WrongThrowId {
                expected: last + 1,
                got: msg.throw_id,
            });
        }
        Ok(())
    }

    /// THROW → BET, or REVEAL → VERIFY/LOST.
    pub fn receive(&mut self, msg: ProtocolMessage) -> Result<BobReply, ProtocolError> {
        match msg.kind {
            MessageKind::Throw(payload) => {
                self.check_new_throw(&msg)?;
                self.apparatus.load(&payload);
                let mut probe = EarlyProbe {
                    apparatus: &mut self.apparatus,
                    used: false,
                };
                let bet = self.strategy.bet(&mut probe, &mut self.rng);
                self.last_id = Some(msg.throw_id);
                self.open = Some(BobOpen {
                    throw_id: msg.throw_id,
                    bet: Some(bet),
                });
                let reply = ProtocolMessage::new(msg.throw_id, MessageKind::Bet(bet));
                self.log(Direction::AliceToBob, msg);
                self.log(Direction::BobToAlice, reply);
                Ok(BobReply {
                    message: reply,
                    record: None,
                })
            }
            MessageKind::Reveal(claim) => {
                let (throw_id, bet) = match &self.open {
                    Some(BobOpen {
                        throw_id,
                        bet: Some(bet),
                    }) if *throw_id == msg.throw_id => (*throw_id, *bet),
                    Some(open) if open.throw_id != msg.throw_id => {
                        return Err(ProtocolError::WrongThrowId {
                            expected: open.throw_id,
                            got: msg.throw_id,
                        })
                    }
                    _ => {
                        return Err(ProtocolError::NoOpenThrow {
                            throw_id: msg.throw_id,
                            kind: KindTag::Reveal,
                        })
                    }
                };
                let detection = self.apparatus.verify(claim.basis());
                let view = VerificationView {
                    throw_id,
                    bet,
                    claim,
                    detection,
                };
                let terminal = match (detection, self.strategy.report(&view, &mut self.rng)) {
                    (Some(Detection::Click(o)), Report::Acknowledge) => MessageKind::Verify(o),
                    _ => MessageKind::Lost,
                };
                let record = close_throw(throw_id, Some(claim), Some(bet), &terminal)?;
                let reply = ProtocolMessage::new(throw_id, terminal);
                self.open = None;
                self.log(Direction::AliceToBob, msg);
                self.log(Direction::BobToAlice, reply);
                self.transcript.push_record(record);
                Ok(BobReply {
                    message: reply,
                    record: Some(record),
                })
            }
            other => Err(ProtocolError::UnexpectedMessage {
                throw_id: msg.throw_id,
                kind: other.tag(),
                state: match &self.open {
                    None => "no open throw",
                    Some(_) => "BET",
                },
            }),
        }
    }

    /// Refuses a THROW outright (`THROW→LOST`), e.g. when the photon never arrived.
    pub fn decline(&mut self, msg: ProtocolMessage) -> Result<BobReply, ProtocolError> {
        if msg.tag() != KindTag::Throw {
            return Err(ProtocolError::UnexpectedMessage {
                throw_id: msg.throw_id,
                kind: msg.tag(),
                state: "no open throw",
            });
        }
        self.check_new_throw(&msg)?;
        self.last_id = Some(msg.throw_id);
        let reply = ProtocolMessage::new(msg.throw_id, MessageKind::Lost);
        let record = close_throw(msg.throw_id, None, None, &MessageKind::Lost)?;
        self.log(Direction::AliceToBob, msg);
        self.log(Direction::BobToAlice, reply);
        self.transcript.push_record(record);
        Ok(BobReply {
            message: reply,
            record: Some(record),
        })
    }
}

/// Plays one throw to completion between two in-memory sessions.
pub fn play_throw(
    alice: &mut AliceSession,
    bob: &mut BobSession,
) -> Result<ThrowRecord, ProtocolError> {
    let throw = alice.begin_throw()?;
    let bet = bob.receive(throw)?.message;
    let reveal = match alice.receive(bet)? {
        AliceStep::Reply(m) => m,
        AliceStep::Closed(r) => return Ok(r),
    };
    let terminal = bob.receive(reveal)?.message;
    match alice.receive(terminal)? {
        AliceStep::Closed(r) => Ok(r),
        AliceStep::Reply(m) => Err(ProtocolError::UnexpectedMessage {
            throw_id: m.throw_id,
            kind: m.tag(),
            state: "VERIFY",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qutrit::{canonical_state, OutcomeLabel};
    use crate::strategies::{HonestAlice, HonestBob, MixtureCheatAlice, Preparation};

    fn loaded(label: StateLabel, basis: BasisLabel, seed: u64) -> Apparatus {
        let mut app = Apparatus::new(NoiseModel::ideal(), seed);
        app.load(&Payload::Pure(canonical_state(label)));
        app.basis = basis;
        app
    }

    #[test]
    fn wrong_basis_is_lost() {
        let mut app = loaded(StateLabel::A11, BasisLabel::Basis2, 1);
        assert_eq!(app.verify(BasisLabel::Basis1), None);
    }

    #[test]
    fn eigenstate_always_clicks_its_outcome() {
        for seed in 0..200 {
            let mut app = loaded(StateLabel::A11, BasisLabel::Basis1, seed);
            assert_eq!(
                app.verify(BasisLabel::Basis1),
                Some(Detection::Click(OutcomeLabel::B11))
            );
        }
    }

    #[test]
    fn cross_set_payload_spreads_over_basis() {
        let n = 10_000;
        let mut counts = [0u32; 3];
        let mut app = Apparatus::new(NoiseModel::ideal(), 7);
        for _ in 0..n {
            app.load(&Payload::Pure(canonical_state(StateLabel::A21)));
            app.basis = BasisLabel::Basis1;
            match app.verify(BasisLabel::Basis1) {
                Some(Detection::Click(o)) => counts[o.slot()] += 1,
                other => panic!("{other:?}"),
            }
        }
        for (c, p) in counts.iter().zip([0.25, 0.25, 0.5]) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn probe_collapses_once() {
        let mut app = loaded(StateLabel::A11, BasisLabel::Basis1, 3);
        let mut probe = EarlyProbe {
            apparatus: &mut app,
            used: false,
        };
        let first = probe.measure_computational();
        assert!(first < 2);
        for _ in 0..5 {
            assert_eq!(probe.measure_computational(), first);
        }
        assert!(probe.was_used());
    }

    #[test]
    fn close_throw_examples() {
        let verify = |o| MessageKind::Verify(o);
        let r = close_throw(0, Some(StateLabel::A11), Some(Coin::Tails), &verify(OutcomeLabel::B11)).unwrap();
        assert_eq!(r.verdict, super::super::Verdict::Success(Coin::Heads));
        let r = close_throw(0, Some(StateLabel::A11), Some(Coin::Tails), &verify(OutcomeLabel::B12)).unwrap();
        assert_eq!(r.verdict, super::super::Verdict::Failure);
        let r = close_throw(0, Some(StateLabel::A21), Some(Coin::Tails), &verify(OutcomeLabel::B23)).unwrap();
        assert_eq!(r.verdict, super::super::Verdict::Failure);
        assert!(matches!(
            close_throw(4, Some(StateLabel::A21), None, &verify(OutcomeLabel::B11)),
            Err(ProtocolError::IllegalOutcome { throw_id: 4, .. })
        ));
    }

    struct Fixed(StateLabel);

    impl AliceStrategy for Fixed {
        fn name(&self) -> &'static str {
            "fixed"
        }

        fn prepare(&mut self, _rng: &mut PartyRng) -> Preparation {
            Preparation {
                payload: canonical_state(self.0),
                plan: ClaimPlan::Truthful(self.0),
            }
        }
    }

    #[test]
    fn honest_reveal_is_the_prepared_state() {
        let mut alice = AliceSession::new(Box::new(Fixed(StateLabel::A22)), 0);
        let throw = alice.begin_throw().unwrap();
        let step = alice
            .receive(ProtocolMessage::new(throw.throw_id, MessageKind::Bet(Coin::Heads)))
            .unwrap();
        assert_eq!(
            step,
            AliceStep::Reply(ProtocolMessage::new(0, MessageKind::Reveal(StateLabel::A22)))
        );
    }

    #[test]
    fn mixture_cheat_claims_against_the_bet() {
        for (bet, claim) in [(Coin::Tails, StateLabel::A12), (Coin::Heads, StateLabel::A21)] {
            let mut alice = AliceSession::new(Box::new(MixtureCheatAlice::ideal()), 5);
            alice.begin_throw().unwrap();
            let step = alice.receive(ProtocolMessage::new(0, MessageKind::Bet(bet))).unwrap();
            assert_eq!(step, AliceStep::Reply(ProtocolMessage::new(0, MessageKind::Reveal(claim))));
        }
    }

    #[test]
    fn ordering_errors() {
        let mut alice = AliceSession::new(Box::new(HonestAlice), 0);
        assert!(matches!(
            alice.receive(ProtocolMessage::new(0, MessageKind::Bet(Coin::Heads))),
            Err(ProtocolError::NoOpenThrow { throw_id: 0, .. })
        ));
        alice.begin_throw().unwrap();
        assert!(matches!(alice.begin_throw(), Err(ProtocolError::ThrowAlreadyOpen(0))));
        alice.receive(ProtocolMessage::new(0, MessageKind::Bet(Coin::Heads))).unwrap();
        // a second BET after REVEAL went out
        assert!(matches!(
            alice.receive(ProtocolMessage::new(0, MessageKind::Bet(Coin::Tails))),
            Err(ProtocolError::UnexpectedMessage { throw_id: 0, .. })
        ));
        assert!(matches!(
            alice.receive(ProtocolMessage::new(3, MessageKind::Lost)),
            Err(ProtocolError::WrongThrowId { expected: 0, got: 3 })
        ));

        let mut bob = BobSession::new(Box::new(HonestBob), NoiseModel::ideal(), 0);
        assert!(matches!(
            bob.receive(ProtocolMessage::new(0, MessageKind::Reveal(StateLabel::A11))),
            Err(ProtocolError::NoOpenThrow { throw_id: 0, .. })
        ));
        let throw = ProtocolMessage::new(0, MessageKind::Throw(Payload::Pure(canonical_state(StateLabel::A11))));
        bob.receive(throw).unwrap();
        assert!(matches!(
            bob.receive(ProtocolMessage::new(1, throw.kind)),
            Err(ProtocolError::UnexpectedMessage { throw_id: 1, .. })
        ));
        assert!(matches!(
            bob.receive(ProtocolMessage::new(0, MessageKind::Verify(OutcomeLabel::B11))),
            Err(ProtocolError::UnexpectedMessage { throw_id: 0, .. })
        ));
    }

    #[test]
    fn stale_throw_ids_are_rejected() {
        let mut bob = BobSession::new(Box::new(HonestBob), NoiseModel::ideal(), 0);
        let throw = |id| ProtocolMessage::new(id, MessageKind::Throw(Payload::Pure(canonical_state(StateLabel::A11))));
        bob.decline(throw(4)).unwrap();
        assert!(matches!(
            bob.receive(throw(4)),
            Err(ProtocolError::WrongThrowId { expected: 5, got: 4 })
        ));
    }

    #[test]
    fn decline_closes_without_bet() {
        let mut alice = AliceSession::new(Box::new(HonestAlice), 1);
        let mut bob = BobSession::new(Box::new(HonestBob), NoiseModel::ideal(), 1);
        let throw = alice.begin_throw().unwrap();
        let reply = bob.decline(throw).unwrap();
        let AliceStep::Closed(record) = alice.receive(reply.message).unwrap() else {
            panic!("LOST should close the throw");
        };
        assert_eq!(Some(record), reply.record);
        assert_eq!(record.bet, None);
        assert_eq!(record.claim, None);
        assert!(crate::protocol::validate_transcript(alice.transcript()).is_ok());
        assert!(crate::protocol::validate_transcript(bob.transcript()).is_ok());
    }

    #[test]
    fn both_sides_record_the_same_throws() {
        let mut alice = AliceSession::new(Box::new(HonestAlice), 9);
        let mut bob = BobSession::new(Box::new(HonestBob), NoiseModel::ideal(), 9);
        for _ in 0..50 {
            play_throw(&mut alice, &mut bob).unwrap();
        }
        assert_eq!(alice.transcript().records(), bob.transcript().records());
        assert_eq!(alice.transcript().entries().len(), bob.transcript().entries().len());
    }
}
