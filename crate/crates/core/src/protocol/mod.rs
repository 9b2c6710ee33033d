//! The two-party equality protocol: framing, session state, transports.
//!
//! Alice sends `HELLO(epsilon, seed_id)`, Bob answers with his own `HELLO`,
//! Alice sends her `k`-bit fingerprint and Bob replies with the verdict.
//! Only the fingerprint counts toward the protocol's communication cost;
//! neither string length is ever transmitted.

pub mod session;
pub mod transport;
pub mod wire;

pub use session::{
    EpsilonPolicy, FingerprintInput, LocalFingerprint, Phase, ProtocolError, ReaderInput, Role,
    Session, VerificationVerdict,
};
pub use transport::{loopback, loopback_session, pipe, run_initiator, run_responder, LoopbackOutcome, PipeEnd};
pub use wire::{decode, encode, Decision, DecodeError, ErrorCode, ProtocolMessage};
