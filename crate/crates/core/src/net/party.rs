use std::net::TcpListener;
use std::thread;

use super::transport::{in_process_pair, ChannelConfig, ChannelMode, TcpTransport, Transport};
use super::{ChannelError, SessionAbort};
use crate::config::RunConfig;
use crate::protocol::{AliceSession, AliceStep, BobSession, ProtocolError, Transcript};
use crate::stats::{build_sessions, RunStats, ATTEMPTS_PER_THROW};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Alice,
    Bob,
}

/// Final state of one party.
#[derive(Clone, Debug, PartialEq)]
pub struct PartyOutcome {
    pub stats: RunStats,
    pub transcript: Transcript,
}

fn abort(error: impl Into<ChannelError>, transcript: &Transcript) -> SessionAbort {
    SessionAbort {
        error: error.into(),
        transcript: transcript.clone(),
    }
}

/// Drives Alice until `n` throws are kept, then closes the channel.
pub fn run_alice<T: Transport + ?Sized>(
    mut alice: AliceSession,
    transport: &mut T,
    n: u64,
) -> Result<PartyOutcome, SessionAbort> {
    let budget = n.saturating_mul(ATTEMPTS_PER_THROW).saturating_add(ATTEMPTS_PER_THROW);
    let mut stats = RunStats::default();
    while stats.n_throws < n {
        if stats.attempts() >= budget {
            return Err(abort(ChannelError::AttemptBudget, alice.transcript()));
        }
        let throw = alice
            .begin_throw()
            .map_err(|e| abort(e, alice.transcript()))?;
        transport
            .send(&throw)
            .map_err(|e| abort(e, alice.transcript()))?;
        loop {
            let msg = match transport.receive() {
                Ok(Some(msg)) => msg,
                Ok(None) => {
                    return Err(abort(ChannelError::CounterpartDisconnected, alice.transcript()))
                }
                Err(e) => return Err(abort(e, alice.transcript())),
            };
            match alice.receive(msg).map_err(|e| abort(e, alice.transcript()))? {
                AliceStep::Reply(reply) => transport
                    .send(&reply)
                    .map_err(|e| abort(e, alice.transcript()))?,
                AliceStep::Closed(record) => {
                    stats.record(&record);
                    break;
                }
            }
        }
    }
    transport.close();
    Ok(PartyOutcome {
        stats,
        transcript: alice.into_transcript(),
    })
}

/// Answers Alice until she closes the channel between throws.
pub fn run_bob<T: Transport + ?Sized>(
    mut bob: BobSession,
    transport: &mut T,
) -> Result<PartyOutcome, SessionAbort> {
    let mut stats = RunStats::default();
    loop {
        let msg = match transport.receive() {
            Ok(Some(msg)) => msg,
            Ok(None) if !bob.has_open_throw() => break,
            Ok(None) => return Err(abort(ChannelError::CounterpartDisconnected, bob.transcript())),
            Err(e) => return Err(abort(e, bob.transcript())),
        };
        let reply = bob.receive(msg).map_err(|e| abort(e, bob.transcript()))?;
        transport
            .send(&reply.message)
            .map_err(|e| abort(e, bob.transcript()))?;
        if let Some(record) = reply.record {
            stats.record(&record);
        }
    }
    transport.close();
    Ok(PartyOutcome {
        stats,
        transcript: bob.into_transcript(),
    })
}

fn sessions(run: &RunConfig) -> Result<(AliceSession, BobSession), SessionAbort> {
    run.validate()
        .map_err(|e| abort(ChannelError::Config(e), &Transcript::new()))?;
    build_sessions(&run.strategies, &run.noise, run.seed)
        .map_err(|e| abort(ChannelError::Setup(e.to_string()), &Transcript::new()))
}

fn open_transport(
    channel: &ChannelConfig,
    listener: Option<&TcpListener>,
) -> Result<Box<dyn Transport>, ChannelError> {
    channel.validate()?;
    match &channel.mode {
        ChannelMode::InProcess => Err(ChannelError::Incompatible(
            "in-process channels need both parties in one process".into(),
        )),
        ChannelMode::Listen { address, port } => {
            let owned;
            let listener = match listener {
                Some(l) => l,
                None => {
                    owned = TcpListener::bind((address.as_str(), *port))?;
                    &owned
                }
            };
            Ok(Box::new(TcpTransport::accept(listener, channel.timeout())?))
        }
        ChannelMode::Connect { address, port } => Ok(Box::new(TcpTransport::connect(
            address,
            *port,
            channel.timeout(),
        )?)),
    }
}

/// Runs one side of a socket session, as the CLI does in each process.
pub fn run_party(role: Role, run: &RunConfig) -> Result<PartyOutcome, SessionAbort> {
    let (alice, bob) = sessions(run)?;
    let mut transport =
        open_transport(&run.channel, None).map_err(|e| abort(e, &Transcript::new()))?;
    match role {
        Role::Alice => run_alice(alice, transport.as_mut(), run.throws),
        Role::Bob => run_bob(bob, transport.as_mut()),
    }
}

/// Both parties' views after a paired run.
#[derive(Clone, Debug, PartialEq)]
pub struct PairOutcome {
    pub alice: PartyOutcome,
    pub bob: PartyOutcome,
}

impl PairOutcome {
    /// Alice's statistics and transcript.
    pub fn stats(&self) -> &RunStats {
        &self.alice.stats
    }
}

/// Runs Alice and Bob on two threads joined by the given channels. Accepted
/// pairs are both in-process, or one listening and one connecting; a
/// connecting port of 0 means "the port the listener actually bound".
pub fn run_session_pair(
    run: &RunConfig,
    alice_channel: &ChannelConfig,
    bob_channel: &ChannelConfig,
) -> Result<PairOutcome, SessionAbort> {
    let (alice, bob) = sessions(run)?;
    let fail = |e: ChannelError| abort(e, &Transcript::new());
    alice_channel.validate().map_err(|e| fail(e.into()))?;
    bob_channel.validate().map_err(|e| fail(e.into()))?;
    let n = run.throws;

    match (&alice_channel.mode, &bob_channel.mode) {
        (ChannelMode::InProcess, ChannelMode::InProcess) => {
            let (mut a_end, mut b_end) = in_process_pair(alice_channel.timeout());
            let bob_thread = thread::spawn(move || run_bob(bob, &mut b_end));
            let alice_result = run_alice(alice, &mut a_end, n);
            drop(a_end);
            let bob_result = bob_thread.join().expect("bob thread panicked");
            Ok(PairOutcome {
                alice: alice_result?,
                bob: bob_result?,
            })
        }
        (ChannelMode::Listen { .. }, ChannelMode::Connect { .. })
        | (ChannelMode::Connect { .. }, ChannelMode::Listen { .. }) => {
            let (listen_cfg, connect_cfg) = match &alice_channel.mode {
                ChannelMode::Listen { .. } => (alice_channel, bob_channel),
                _ => (bob_channel, alice_channel),
            };
            let ChannelMode::Listen { address, port } = &listen_cfg.mode else {
                unreachable!()
            };
            let listener = TcpListener::bind((address.as_str(), *port))
                .map_err(|e| fail(e.into()))?;
            let bound = listener.local_addr().map_err(|e| fail(e.into()))?;
            let mut connect_cfg = connect_cfg.clone();
            if let ChannelMode::Connect { port: p @ 0, .. } = &mut connect_cfg.mode {
                *p = bound.port();
            }
            let listen_cfg = listen_cfg.clone();
            let alice_listens = matches!(alice_channel.mode, ChannelMode::Listen { .. });
            let (alice_cfg, bob_cfg) = if alice_listens {
                (listen_cfg, connect_cfg)
            } else {
                (connect_cfg, listen_cfg)
            };
            let listener_ref = &listener;
            thread::scope(|scope| {
                let bob_thread = scope.spawn(move || {
                    let mut t = open_transport(&bob_cfg, (!alice_listens).then_some(listener_ref))
                        .map_err(|e| abort(e, &Transcript::new()))?;
                    run_bob(bob, t.as_mut())
                });
                let alice_result = open_transport(&alice_cfg, alice_listens.then_some(listener_ref))
                    .map_err(|e| abort(e, &Transcript::new()))
                    .and_then(|mut t| run_alice(alice, t.as_mut(), n));
                let bob_result = bob_thread.join().expect("bob thread panicked");
                Ok(PairOutcome {
                    alice: alice_result?,
                    bob: bob_result?,
                })
            })
        }
        (a, b) => Err(fail(ChannelError::Incompatible(format!(
            "cannot pair {a:?} with {b:?}"
        )))),
    }
}

impl From<ProtocolError> for ChannelError {
    fn from(e: ProtocolError) -> Self {
        ChannelError::Protocol(e)
    }
}
