//! Frame encoding.
//!
//! All integers are big-endian.
//!
//! ```text
//! frame       = magic "NBLV" | version 0x01 | kind u8 | payload_len u32 | payload
//! HELLO       (0x01) = epsilon f64 | seed_id [16]
//! FINGERPRINT (0x02) = k u32 | ceil(k/8) bytes, MSB-first, +1 -> 1, -1 -> 0, pad bits 0
//! VERDICT     (0x03) = 0x01 equal_presumed | 0x00 different
//! ERROR       (0x7F) = code u8 | UTF-8 text
//! ```

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::bits::SignVector;
use crate::coin::{SeedId, SEED_ID_LEN};

pub const MAGIC: [u8; 4] = *b"NBLV";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 10;
/// Largest payload accepted by the decoder.
pub const MAX_PAYLOAD: u32 = 1 << 20;

const KIND_HELLO: u8 = 0x01;
const KIND_FINGERPRINT: u8 = 0x02;
const KIND_VERDICT: u8 = 0x03;
const KIND_ERROR: u8 = 0x7F;

const HELLO_LEN: usize = 8 + SEED_ID_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    EqualPresumed,
    Different,
}

impl Decision {
    fn to_byte(self) -> u8 {
        match self {
            Decision::EqualPresumed => 0x01,
            Decision::Different => 0x00,
        }
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::EqualPresumed => "equal_presumed",
            Decision::Different => "different",
        })
    }
}

/// Codes carried by ERROR frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    SeedMismatch,
    ParamMismatch,
    Framing,
    OutOfPhase,
    InputUnavailable,
    Other(u8),
}

impl ErrorCode {
    pub fn to_byte(self) -> u8 {
        match self {
            ErrorCode::SeedMismatch => 0x01,
            ErrorCode::ParamMismatch => 0x02,
            ErrorCode::Framing => 0x03,
            ErrorCode::OutOfPhase => 0x04,
            ErrorCode::InputUnavailable => 0x05,
            ErrorCode::Other(b) => b,
        }
    }

    pub fn from_byte(b: u8) -> Self {
        match b {
            0x01 => ErrorCode::SeedMismatch,
            0x02 => ErrorCode::ParamMismatch,
            0x03 => ErrorCode::Framing,
            0x04 => ErrorCode::OutOfPhase,
            0x05 => ErrorCode::InputUnavailable,
            other => ErrorCode::Other(other),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorCode::SeedMismatch => "SEED_MISMATCH",
            ErrorCode::ParamMismatch => "PARAM_MISMATCH",
            ErrorCode::Framing => "FRAMING",
            ErrorCode::OutOfPhase => "OUT_OF_PHASE",
            ErrorCode::InputUnavailable => "INPUT_UNAVAILABLE",
            ErrorCode::Other(_) => "UNKNOWN",
        }
    }
}

impl std::fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorCode::Other(b) => write!(f, "UNKNOWN(0x{b:02x})"),
            c => f.write_str(c.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolMessage {
    Hello { epsilon: f64, seed_id: SeedId },
    Fingerprint { values: SignVector },
    Verdict { decision: Decision },
    Error { code: ErrorCode, text: String },
}

impl ProtocolMessage {
    pub fn kind_byte(&self) -> u8 {
        match self {
            ProtocolMessage::Hello { .. } => KIND_HELLO,
            ProtocolMessage::Fingerprint { .. } => KIND_FINGERPRINT,
            ProtocolMessage::Verdict { .. } => KIND_VERDICT,
            ProtocolMessage::Error { .. } => KIND_ERROR,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ProtocolMessage::Hello { .. } => "HELLO",
            ProtocolMessage::Fingerprint { .. } => "FINGERPRINT",
            ProtocolMessage::Verdict { .. } => "VERDICT",
            ProtocolMessage::Error { .. } => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unknown protocol version {0}")]
    UnknownVersion(u8),
    #[error("unknown message kind 0x{0:02x}")]
    UnknownKind(u8),
    #[error("truncated frame: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("payload length {0} exceeds limit {MAX_PAYLOAD}")]
    LengthOverflow(u32),
    #[error("malformed {kind} payload: {reason}")]
    BadPayload {
        kind: &'static str,
        reason: &'static str,
    },
    #[error("{0} trailing bytes after frame")]
    TrailingBytes(usize),
}

fn payload(msg: &ProtocolMessage) -> Vec<u8> {
    match msg {
        ProtocolMessage::Hello { epsilon, seed_id } => {
            let mut p = Vec::with_capacity(HELLO_LEN);
            p.extend_from_slice(&epsilon.to_be_bytes());
            p.extend_from_slice(seed_id.as_bytes());
            p
        }
        ProtocolMessage::Fingerprint { values } => {
            let k = u32::try_from(values.len()).expect("fingerprint longer than u32::MAX");
            let mut p = k.to_be_bytes().to_vec();
            p.extend(values.pack_msb_first());
            p
        }
        ProtocolMessage::Verdict { decision } => vec![decision.to_byte()],
        ProtocolMessage::Error { code, text } => {
            let mut p = vec![code.to_byte()];
            p.extend_from_slice(text.as_bytes());
            p
        }
    }
}

pub fn encode(msg: &ProtocolMessage) -> Vec<u8> {
    let body = payload(msg);
    let mut out = Vec::with_capacity(HEADER_LEN + body.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(msg.kind_byte());
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(&body);
    out
}

struct Header {
    kind: u8,
    len: u32,
}

fn parse_header(h: &[u8; HEADER_LEN]) -> Result<Header, DecodeError> {
    let magic: [u8; 4] = h[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(DecodeError::BadMagic(magic));
    }
    if h[4] != VERSION {
        return Err(DecodeError::UnknownVersion(h[4]));
    }
    let kind = h[5];
    if !matches!(kind, KIND_HELLO | KIND_FINGERPRINT | KIND_VERDICT | KIND_ERROR) {
        return Err(DecodeError::UnknownKind(kind));
    }
    let len = u32::from_be_bytes(h[6..10].try_into().unwrap());
    if len > MAX_PAYLOAD {
        return Err(DecodeError::LengthOverflow(len));
    }
    Ok(Header { kind, len })
}

fn parse_payload(kind: u8, p: &[u8]) -> Result<ProtocolMessage, DecodeError> {
    let bad = |kind, reason| DecodeError::BadPayload { kind, reason };
    match kind {
        KIND_HELLO => {
            if p.len() != HELLO_LEN {
                return Err(bad("HELLO", "payload must be 24 bytes"));
            }
            let epsilon = f64::from_be_bytes(p[..8].try_into().unwrap());
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(bad("HELLO", "epsilon outside (0, 1)"));
            }
            let seed_id = SeedId(p[8..].try_into().unwrap());
            Ok(ProtocolMessage::Hello { epsilon, seed_id })
        }
        KIND_FINGERPRINT => {
            if p.len() < 4 {
                return Err(bad("FINGERPRINT", "missing k"));
            }
            let k = u32::from_be_bytes(p[..4].try_into().unwrap()) as usize;
            if k == 0 {
                return Err(bad("FINGERPRINT", "k must be positive"));
            }
            if p.len() - 4 != k.div_ceil(8) {
                return Err(bad("FINGERPRINT", "packed length does not match k"));
            }
            let values = SignVector::unpack_msb_first(&p[4..], k)
                .ok_or(bad("FINGERPRINT", "nonzero pad bits"))?;
            Ok(ProtocolMessage::Fingerprint { values })
        }
        KIND_VERDICT => match p {
            [0x01] => Ok(ProtocolMessage::Verdict {
                decision: Decision::EqualPresumed,
            }),
            [0x00] => Ok(ProtocolMessage::Verdict {
                decision: Decision::Different,
            }),
            [_] => Err(bad("VERDICT", "decision byte must be 0x00 or 0x01")),
            _ => Err(bad("VERDICT", "payload must be 1 byte")),
        },
        KIND_ERROR => {
            let (&code, text) = p.split_first().ok_or(bad("ERROR", "missing code"))?;
            let text = std::str::from_utf8(text)
                .map_err(|_| bad("ERROR", "text is not UTF-8"))?
                .to_owned();
            Ok(ProtocolMessage::Error {
                code: ErrorCode::from_byte(code),
                text,
            })
        }
        _ => unreachable!("kind validated in header"),
    }
}

/// Decodes one frame from the front of `bytes`, returning it and the
/// number of bytes used.
pub fn decode_prefix(bytes: &[u8]) -> Result<(ProtocolMessage, usize), DecodeError> {
    if bytes.len() < HEADER_LEN {
        return Err(DecodeError::Truncated {
            needed: HEADER_LEN,
            available: bytes.len(),
        });
    }
    let header = parse_header(bytes[..HEADER_LEN].try_into().unwrap())?;
    let total = HEADER_LEN + header.len as usize;
    if bytes.len() < total {
        return Err(DecodeError::Truncated {
            needed: total,
            available: bytes.len(),
        });
    }
    let msg = parse_payload(header.kind, &bytes[HEADER_LEN..total])?;
    Ok((msg, total))
}

/// Decodes exactly one frame.
pub fn decode(bytes: &[u8]) -> Result<ProtocolMessage, DecodeError> {
    let (msg, used) = decode_prefix(bytes)?;
    if used != bytes.len() {
        return Err(DecodeError::TrailingBytes(bytes.len() - used));
    }
    Ok(msg)
}

#[derive(Debug, Error)]
pub enum ReadFrameError {
    #[error("transport: {0}")]
    Io(#[from] io::Error),
    #[error("framing: {0}")]
    Decode(#[from] DecodeError),
}

/// Reads one frame; returns it with its size on the wire.
pub fn read_frame<R: Read>(mut reader: R) -> Result<(ProtocolMessage, usize), ReadFrameError> {
    let mut header = [0u8; HEADER_LEN];
    reader.read_exact(&mut header)?;
    let h = parse_header(&header)?;
    let mut body = vec![0u8; h.len as usize];
    reader.read_exact(&mut body)?;
    Ok((parse_payload(h.kind, &body)?, HEADER_LEN + body.len()))
}

/// Writes one frame; returns its size on the wire.
pub fn write_frame<W: Write>(mut writer: W, msg: &ProtocolMessage) -> io::Result<usize> {
    let bytes = encode(msg);
    writer.write_all(&bytes)?;
    writer.flush()?;
    Ok(bytes.len())
}
