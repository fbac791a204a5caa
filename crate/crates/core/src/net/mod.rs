//! Framed transport between Alice and Bob, in-process or over TCP.

mod frame;
mod party;
mod transport;

use std::io;
use std::time::Duration;

use thiserror::Error;

pub use frame::{
    read_frame, write_frame, Frame, FrameError, ReadError, LENGTH_PREFIX, MAX_FRAME_LEN,
};
pub use party::{run_alice, run_bob, run_party, run_session_pair, PairOutcome, PartyOutcome, Role};
pub use transport::{
    in_process_pair, ChannelConfig, ChannelMode, InProcessTransport, TcpTransport, Transport,
};

use crate::config::ConfigError;
use crate::protocol::{ProtocolError, Transcript};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("no frame within {0:?}")]
    Timeout(Duration),
    #[error("counterpart disconnected")]
    CounterpartDisconnected,
    #[error("channel already closed")]
    Closed,
    #[error("malformed frame: {0}")]
    Malformed(#[from] FrameError),
    #[error("i/o error: {0}")]
    Io(io::Error),
    #[error(transparent)]
    Protocol(ProtocolError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("session setup failed: {0}")]
    Setup(String),
    #[error("incompatible channels: {0}")]
    Incompatible(String),
    #[error("attempt budget exhausted")]
    AttemptBudget,
}

impl ChannelError {
    /// Short machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            ChannelError::Timeout(_) => "timeout",
            ChannelError::CounterpartDisconnected => "counterpart_disconnected",
            ChannelError::Closed => "closed",
            ChannelError::Malformed(_) => "malformed_frame",
            ChannelError::Io(_) => "io",
            ChannelError::Protocol(_) => "protocol",
            ChannelError::Config(_) => "config",
            ChannelError::Setup(_) => "setup",
            ChannelError::Incompatible(_) => "incompatible_channels",
            ChannelError::AttemptBudget => "attempt_budget",
        }
    }
}

impl From<io::Error> for ChannelError {
    fn from(e: io::Error) -> Self {
        use io::ErrorKind::*;
        match e.kind() {
            BrokenPipe | ConnectionReset | ConnectionAborted | UnexpectedEof => {
                ChannelError::CounterpartDisconnected
            }
            _ => ChannelError::Io(e),
        }
    }
}

/// A session that ended early, with whatever that party had logged.
#[derive(Debug, Error)]
#[error("{error}")]
pub struct SessionAbort {
    pub error: ChannelError,
    pub transcript: Transcript,
}
