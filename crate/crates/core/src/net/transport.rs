use std::io::{self, BufReader};
use std::net::{Shutdown, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::frame::{read_frame, write_frame, Frame, ReadError};
use super::ChannelError;
use crate::config::ConfigError;
use crate::protocol::ProtocolMessage;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ChannelMode {
    #[default]
    InProcess,
    Listen {
        address: String,
        port: u16,
    },
    Connect {
        address: String,
        port: u16,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelConfig {
    #[serde(flatten)]
    pub mode: ChannelMode,
    /// Read timeout in milliseconds; in connect mode also the time allowed
    /// for the listener to appear.
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_timeout_ms() -> u64 {
    5000
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            mode: ChannelMode::InProcess,
            timeout_ms: default_timeout_ms(),
        }
    }
}

impl ChannelConfig {
    pub fn in_process() -> Self {
        Self::default()
    }

    pub fn listen(address: impl Into<String>, port: u16) -> Self {
        ChannelConfig {
            mode: ChannelMode::Listen {
                address: address.into(),
                port,
            },
            ..Self::default()
        }
    }

    pub fn connect(address: impl Into<String>, port: u16) -> Self {
        ChannelConfig {
            mode: ChannelMode::Connect {
                address: address.into(),
                port,
            },
            ..Self::default()
        }
    }

    pub fn with_timeout_ms(mut self, timeout_ms: u64) -> Self {
        self.timeout_ms = timeout_ms;
        self
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.mode != ChannelMode::InProcess && self.timeout_ms == 0 {
            return Err(ConfigError::invalid("channel.timeout_ms", "must be positive for sockets"));
        }
        Ok(())
    }
}

/// Exactly-once, in-order frame delivery in each direction.
pub trait Transport: Send {
    fn send_frame(&mut self, frame: &Frame) -> Result<(), ChannelError>;

    /// `Ok(None)` when the peer closed the channel between frames.
    fn receive_frame(&mut self) -> Result<Option<Frame>, ChannelError>;

    fn send(&mut self, msg: &ProtocolMessage) -> Result<(), ChannelError> {
        self.send_frame(&Frame::encode(msg))
    }

    fn receive(&mut self) -> Result<Option<ProtocolMessage>, ChannelError> {
        match self.receive_frame()? {
            Some(frame) => Ok(Some(frame.decode()?)),
            None => Ok(None),
        }
    }

    /// Signals the peer that no more frames follow.
    fn close(&mut self) {}
}

/// Encoded frames passed over a pair of std channels.
pub struct InProcessTransport {
    tx: Option<Sender<Vec<u8>>>,
    rx: Receiver<Vec<u8>>,
    timeout: Duration,
}

pub fn in_process_pair(timeout: Duration) -> (InProcessTransport, InProcessTransport) {
    let (a_tx, b_rx) = mpsc::channel();
    let (b_tx, a_rx) = mpsc::channel();
    (
        InProcessTransport {
            tx: Some(a_tx),
            rx: a_rx,
            timeout,
        },
        InProcessTransport {
            tx: Some(b_tx),
            rx: b_rx,
            timeout,
        },
    )
}

impl Transport for InProcessTransport {
    fn send_frame(&mut self, frame: &Frame) -> Result<(), ChannelError> {
        let tx = self.tx.as_ref().ok_or(ChannelError::Closed)?;
        tx.send(frame.to_bytes())
            .map_err(|_| ChannelError::CounterpartDisconnected)
    }

    fn receive_frame(&mut self) -> Result<Option<Frame>, ChannelError> {
        match self.rx.recv_timeout(self.timeout) {
            Ok(bytes) => Ok(Some(Frame::from_bytes(&bytes)?)),
            Err(RecvTimeoutError::Timeout) => Err(ChannelError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => Ok(None),
        }
    }

    fn close(&mut self) {
        self.tx = None;
    }
}

pub struct TcpTransport {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    timeout: Duration,
}

impl TcpTransport {
    pub fn new(stream: TcpStream, timeout: Duration) -> Result<Self, ChannelError> {
        stream.set_nodelay(true)?;
        stream.set_read_timeout(Some(timeout))?;
        let writer = stream.try_clone()?;
        Ok(TcpTransport {
            reader: BufReader::new(stream),
            writer,
            timeout,
        })
    }

    /// Connects, retrying until `timeout` elapses so the listener may start later.
    pub fn connect(address: &str, port: u16, timeout: Duration) -> Result<Self, ChannelError> {
        let deadline = Instant::now() + timeout;
        let addrs: Vec<_> = (address, port).to_socket_addrs()?.collect();
        loop {
            let mut last_err = None;
            for addr in &addrs {
                match TcpStream::connect_timeout(addr, timeout) {
                    Ok(stream) => return Self::new(stream, timeout),
                    Err(e) => last_err = Some(e),
                }
            }
            if Instant::now() >= deadline {
                return Err(last_err
                    .map(ChannelError::from)
                    .unwrap_or(ChannelError::Timeout(timeout)));
            }
            thread::sleep(Duration::from_millis(20));
        }
    }

    /// Accepts a single peer on an already bound listener.
    pub fn accept(listener: &TcpListener, timeout: Duration) -> Result<Self, ChannelError> {
        let (stream, _) = listener.accept()?;
        Self::new(stream, timeout)
    }
}

impl Transport for TcpTransport {
    fn send_frame(&mut self, frame: &Frame) -> Result<(), ChannelError> {
        write_frame(&mut self.writer, frame).map_err(ChannelError::from)
    }

    fn receive_frame(&mut self) -> Result<Option<Frame>, ChannelError> {
        match read_frame(&mut self.reader) {
            Ok(frame) => Ok(frame),
            Err(ReadError::Truncated) => Err(ChannelError::CounterpartDisconnected),
            Err(ReadError::Malformed(e)) => Err(ChannelError::Malformed(e)),
            Err(ReadError::Io(e)) if is_timeout(&e) => Err(ChannelError::Timeout(self.timeout)),
            Err(ReadError::Io(e)) => Err(e.into()),
        }
    }

    fn close(&mut self) {
        let _ = self.writer.shutdown(Shutdown::Write);
    }
}

fn is_timeout(e: &io::Error) -> bool {
    matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut)
}
