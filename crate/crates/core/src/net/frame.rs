//! Wire format: a 32-bit big-endian length followed by that many bytes of
//! UTF-8 JSON, one message per frame:
//!
//! ```text
//! {"throw_id":7,"kind":"THROW","body":{"pure":[[re,im],[re,im],[re,im]]}}
//! {"throw_id":7,"kind":"THROW","body":{"mixed":[[[re,im],..3],..3 rows]}}
//! {"throw_id":7,"kind":"BET","body":{"coin":"heads"}}
//! {"throw_id":7,"kind":"REVEAL","body":{"claim":"A12"}}
//! {"throw_id":7,"kind":"VERIFY","body":{"outcome":"B13"}}
//! {"throw_id":7,"kind":"LOST","body":{}}
//! ```
//!
//! Amplitudes are written with 17 significant digits so they decode to the
//! identical `f64`.

use std::io::{self, Read, Write};

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::protocol::{KindTag, MessageKind, Payload, ProtocolMessage};
use crate::qutrit::{Coin, DensityOperator, Operator, OutcomeLabel, QutritState, StateLabel};

pub const LENGTH_PREFIX: usize = 4;
/// Largest payload accepted from the wire.
pub const MAX_FRAME_LEN: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed frame at byte {offset}: {reason}")]
pub struct FrameError {
    /// Offset from the start of the frame, length prefix included.
    pub offset: usize,
    pub reason: String,
}

impl FrameError {
    fn at(offset: usize, reason: impl Into<String>) -> Self {
        FrameError {
            offset,
            reason: reason.into(),
        }
    }
}

/// One encoded message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    payload: Vec<u8>,
}

fn push_f64(out: &mut String, x: f64) {
    use std::fmt::Write as _;
    write!(out, "{x:.16e}").expect("writing to a String");
}

fn push_complex(out: &mut String, z: Complex64) {
    out.push('[');
    push_f64(out, z.re);
    out.push(',');
    push_f64(out, z.im);
    out.push(']');
}

fn push_row(out: &mut String, row: impl IntoIterator<Item = Complex64>) {
    out.push('[');
    for (i, z) in row.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_complex(out, z);
    }
    out.push(']');
}

impl Frame {
    pub fn encode(msg: &ProtocolMessage) -> Frame {
        let mut body = String::new();
        match &msg.kind {
            MessageKind::Throw(Payload::Pure(s)) => {
                body.push_str("{\"pure\":");
                push_row(&mut body, s.amplitudes());
                body.push('}');
            }
            MessageKind::Throw(Payload::Mixed(rho)) => {
                body.push_str("{\"mixed\":[");
                let m = rho.matrix();
                for r in 0..3 {
                    if r > 0 {
                        body.push(',');
                    }
                    push_row(&mut body, (0..3).map(|c| m[(r, c)]));
                }
                body.push_str("]}");
            }
            MessageKind::Bet(coin) => body.push_str(&format!("{{\"coin\":\"{coin}\"}}")),
            MessageKind::Reveal(claim) => body.push_str(&format!("{{\"claim\":\"{claim}\"}}")),
            MessageKind::Verify(o) => body.push_str(&format!("{{\"outcome\":\"{o}\"}}")),
            MessageKind::Lost => body.push_str("{}"),
        }
        let text = format!(
            "{{\"throw_id\":{},\"kind\":\"{}\",\"body\":{}}}",
            msg.throw_id,
            msg.tag(),
            body
        );
        Frame {
            payload: text.into_bytes(),
        }
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// Length prefix plus payload.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(LENGTH_PREFIX + self.payload.len());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses exactly one frame; the length field must match the remaining bytes.
    pub fn from_bytes(bytes: &[u8]) -> Result<Frame, FrameError> {
        if bytes.len() < LENGTH_PREFIX {
            return Err(FrameError::at(0, "truncated length prefix"));
        }
        let declared = u32::from_be_bytes(bytes[..LENGTH_PREFIX].try_into().expect("4 bytes")) as usize;
        let actual = bytes.len() - LENGTH_PREFIX;
        if declared != actual {
            return Err(FrameError::at(
                0,
                format!("length field {declared} does not match payload length {actual}"),
            ));
        }
        Ok(Frame {
            payload: bytes[LENGTH_PREFIX..].to_vec(),
        })
    }

    pub fn decode(&self) -> Result<ProtocolMessage, FrameError> {
        let text = std::str::from_utf8(&self.payload).map_err(|e| {
            FrameError::at(LENGTH_PREFIX + e.valid_up_to(), "payload is not valid UTF-8")
        })?;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Envelope {
            throw_id: u64,
            kind: String,
            body: Value,
        }

        let env: Envelope = serde_json::from_str(text)
            .map_err(|e| FrameError::at(LENGTH_PREFIX + json_offset(text, &e), e.to_string()))?;
        let kind_offset = LENGTH_PREFIX + text.find("\"kind\"").unwrap_or(0);
        let body_offset = LENGTH_PREFIX + text.find("\"body\"").unwrap_or(0);
        let tag = KindTag::from_name(&env.kind)
            .ok_or_else(|| FrameError::at(kind_offset, format!("unknown kind {:?}", env.kind)))?;
        let bad_body = |reason: &str| FrameError::at(body_offset, format!("{tag} body: {reason}"));

        let field = |name: &str| -> Result<&str, FrameError> {
            env.body
                .get(name)
                .and_then(Value::as_str)
                .ok_or_else(|| bad_body(&format!("missing string field {name:?}")))
        };
        let kind = match tag {
            KindTag::Throw => MessageKind::Throw(decode_payload(&env.body).map_err(|r| bad_body(&r))?),
            KindTag::Bet => MessageKind::Bet(match field("coin")? {
                "heads" => Coin::Heads,
                "tails" => Coin::Tails,
                other => return Err(bad_body(&format!("unknown coin {other:?}"))),
            }),
            KindTag::Reveal => {
                let name = field("claim")?;
                MessageKind::Reveal(
                    StateLabel::from_name(name)
                        .ok_or_else(|| bad_body(&format!("unknown state {name:?}")))?,
                )
            }
            KindTag::Verify => {
                let name = field("outcome")?;
                MessageKind::Verify(
                    OutcomeLabel::from_name(name)
                        .ok_or_else(|| bad_body(&format!("unknown outcome {name:?}")))?,
                )
            }
            KindTag::Lost => {
                if env.body.as_object().is_some_and(|o| o.is_empty()) {
                    MessageKind::Lost
                } else {
                    return Err(bad_body("expected an empty object"));
                }
            }
        };
        Ok(ProtocolMessage::new(env.throw_id, kind))
    }
}

fn json_offset(text: &str, err: &serde_json::Error) -> usize {
    let preceding: usize = text
        .split_inclusive('\n')
        .take(err.line().saturating_sub(1))
        .map(str::len)
        .sum();
    (preceding + err.column().saturating_sub(1)).min(text.len())
}

fn complex_of(v: &Value) -> Option<Complex64> {
    let pair = v.as_array().filter(|a| a.len() == 2)?;
    Some(Complex64::new(pair[0].as_f64()?, pair[1].as_f64()?))
}

fn row_of(v: &Value) -> Option<[Complex64; 3]> {
    let row = v.as_array().filter(|a| a.len() == 3)?;
    Some([complex_of(&row[0])?, complex_of(&row[1])?, complex_of(&row[2])?])
}

fn decode_payload(body: &Value) -> Result<Payload, String> {
    let obj = body.as_object().ok_or("expected an object")?;
    match (obj.get("pure"), obj.get("mixed"), obj.len()) {
        (Some(v), None, 1) => {
            let amps = row_of(v).ok_or("pure state must be three [re, im] pairs")?;
            QutritState::new(amps)
                .map(Payload::Pure)
                .map_err(|e| e.to_string())
        }
        (None, Some(v), 1) => {
            let rows = v
                .as_array()
                .filter(|a| a.len() == 3)
                .and_then(|a| Some([row_of(&a[0])?, row_of(&a[1])?, row_of(&a[2])?]))
                .ok_or("mixed state must be a 3x3 matrix of [re, im] pairs")?;
            let m = Operator::from_fn(|r, c| rows[r][c]);
            DensityOperator::new(m)
                .map(Payload::Mixed)
                .map_err(|e| e.to_string())
        }
        _ => Err("expected exactly one of \"pure\" or \"mixed\"".into()),
    }
}

pub fn write_frame<W: Write>(out: &mut W, frame: &Frame) -> io::Result<()> {
    out.write_all(&frame.to_bytes())?;
    out.flush()
}

/// Reads the next frame. `Ok(None)` means the stream ended cleanly on a
/// frame boundary.
pub fn read_frame<R: Read>(input: &mut R) -> Result<Option<Frame>, ReadError> {
    let mut prefix = [0u8; LENGTH_PREFIX];
    let mut filled = 0;
    while filled < LENGTH_PREFIX {
        match input.read(&mut prefix[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => return Err(ReadError::Truncated),
            Ok(k) => filled += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(ReadError::Io(e)),
        }
    }
    let len = u32::from_be_bytes(prefix) as usize;
    if len > MAX_FRAME_LEN {
        return Err(ReadError::Malformed(FrameError::at(
            0,
            format!("length field {len} exceeds the {MAX_FRAME_LEN}-byte limit"),
        )));
    }
    let mut payload = vec![0u8; len];
    input.read_exact(&mut payload).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => ReadError::Truncated,
        _ => ReadError::Io(e),
    })?;
    Ok(Some(Frame { payload }))
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("stream ended inside a frame")]
    Truncated,
    #[error(transparent)]
    Malformed(FrameError),
    #[error(transparent)]
    Io(io::Error),
}
