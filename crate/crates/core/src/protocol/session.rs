//! Sans-IO session state machine.
//!
//! ```text
//! initiator                         responder
//!   Init --HELLO-->                   Init
//!                    <--HELLO--       HelloExchanged
//!   HelloExchanged
//!   FingerprintSent --FINGERPRINT-->
//!                    <--VERDICT--     Done
//!   Done
//! ```
//!
//! Any out-of-phase or malformed message moves the session to `Failed`.
//! The session never reads or writes bytes itself: drivers feed it decoded
//! messages and send whatever it returns.

use std::io::{self, Read};

use thiserror::Error;

use crate::bits::BitString;
use crate::coin::{CoinSource, SeedId};
use crate::protocol::wire::{Decision, DecodeError, ErrorCode, ProtocolMessage};
use crate::rtw::{check_equal_relations, compute_k, EqualRelations, FingerprintAccumulator, RtwFingerprint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Initiator,
    Responder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Init,
    HelloExchanged,
    FingerprintSent,
    Done,
    Failed,
}

/// How a responder settles the error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonPolicy {
    /// The initiator must offer exactly this value.
    Require(f64),
    /// Adopt whatever valid value the initiator offers.
    AcceptOffered,
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("SEED_MISMATCH: local seed {local}, peer seed {remote}")]
    SeedMismatch { local: SeedId, remote: SeedId },
    #[error("PARAM_MISMATCH: {0}")]
    ParamMismatch(String),
    #[error("FRAMING: {0}")]
    Framing(#[from] DecodeError),
    #[error("OUT_OF_PHASE: {kind} received in phase {phase:?}")]
    OutOfPhase { phase: Phase, kind: &'static str },
    #[error("peer aborted with {code}: {text}")]
    Remote { code: ErrorCode, text: String },
    #[error("cannot read local input: {0}")]
    Input(io::Error),
    #[error("transport: {0}")]
    Transport(io::Error),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl ProtocolError {
    /// The wire code this error maps to, for either side of the exchange.
    pub fn code(&self) -> Option<ErrorCode> {
        match self {
            ProtocolError::SeedMismatch { .. } => Some(ErrorCode::SeedMismatch),
            ProtocolError::ParamMismatch(_) => Some(ErrorCode::ParamMismatch),
            ProtocolError::Framing(_) => Some(ErrorCode::Framing),
            ProtocolError::OutOfPhase { .. } => Some(ErrorCode::OutOfPhase),
            ProtocolError::Remote { code, .. } => Some(*code),
            ProtocolError::Input(_) => Some(ErrorCode::InputUnavailable),
            ProtocolError::Transport(_) | ProtocolError::InvalidParameter(_) => None,
        }
    }
}

/// Which local string a session fingerprints. Called once, after `k` is
/// settled; lengths never leave the process.
pub trait FingerprintInput {
    fn fingerprint<C: CoinSource>(&mut self, coins: &C, k: usize) -> io::Result<LocalFingerprint>;
}

#[derive(Debug, Clone)]
pub struct LocalFingerprint {
    pub fingerprint: RtwFingerprint,
    /// String length in bits.
    pub length: u64,
}

impl FingerprintInput for BitString {
    fn fingerprint<C: CoinSource>(&mut self, coins: &C, k: usize) -> io::Result<LocalFingerprint> {
        let mut acc = FingerprintAccumulator::new(coins, k);
        self.iter().for_each(|b| acc.push(b));
        Ok(LocalFingerprint {
            length: acc.positions(),
            fingerprint: acc.finish(None),
        })
    }
}

impl FingerprintInput for &BitString {
    fn fingerprint<C: CoinSource>(&mut self, coins: &C, k: usize) -> io::Result<LocalFingerprint> {
        let mut acc = FingerprintAccumulator::new(coins, k);
        self.iter().for_each(|b| acc.push(b));
        Ok(LocalFingerprint {
            length: acc.positions(),
            fingerprint: acc.finish(None),
        })
    }
}

/// A byte string, expanded MSB-first with bit 1 as `+1`.
impl FingerprintInput for &[u8] {
    fn fingerprint<C: CoinSource>(&mut self, coins: &C, k: usize) -> io::Result<LocalFingerprint> {
        let mut acc = FingerprintAccumulator::new(coins, k);
        acc.push_bytes(self);
        Ok(LocalFingerprint {
            length: acc.positions(),
            fingerprint: acc.finish(None),
        })
    }
}

/// A byte stream such as an open file, consumed on first use.
pub struct ReaderInput<R>(Option<R>);

impl<R: Read> ReaderInput<R> {
    pub fn new(reader: R) -> Self {
        ReaderInput(Some(reader))
    }
}

impl<R: Read> FingerprintInput for ReaderInput<R> {
    fn fingerprint<C: CoinSource>(&mut self, coins: &C, k: usize) -> io::Result<LocalFingerprint> {
        let reader = self
            .0
            .take()
            .ok_or_else(|| io::Error::other("reader input already consumed"))?;
        let mut acc = FingerprintAccumulator::new(coins, k);
        acc.push_reader(reader)?;
        Ok(LocalFingerprint {
            length: acc.positions(),
            fingerprint: acc.finish(None),
        })
    }
}

/// Outcome of a completed session.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationVerdict {
    pub decision: Decision,
    pub epsilon: f64,
    pub k: usize,
    /// Protocol cost: fingerprint payload bits only.
    pub bits_communicated: u64,
    /// Everything on the wire, framing and negotiation included.
    pub transport_bytes: u64,
    /// Local string length in bits.
    pub local_length: u64,
    /// Both lengths, when a harness happens to know them.
    pub lengths_known: Option<(u64, u64)>,
}

pub struct Session<C, I> {
    role: Role,
    phase: Phase,
    coins: C,
    input: I,
    policy: EpsilonPolicy,
    epsilon: Option<f64>,
    k: Option<usize>,
    bits_charged: u64,
    local_length: Option<u64>,
    decision: Option<Decision>,
    failure: Option<ProtocolError>,
}

fn validated_epsilon(epsilon: f64) -> Result<usize, ProtocolError> {
    compute_k(epsilon).map_err(|e| ProtocolError::InvalidParameter(e.to_string()))
}

impl<C: CoinSource, I: FingerprintInput> Session<C, I> {
    pub fn initiator(coins: C, input: I, epsilon: f64) -> Result<Self, ProtocolError> {
        let k = validated_epsilon(epsilon)?;
        Ok(Session {
            role: Role::Initiator,
            phase: Phase::Init,
            coins,
            input,
            policy: EpsilonPolicy::Require(epsilon),
            epsilon: Some(epsilon),
            k: Some(k),
            bits_charged: 0,
            local_length: None,
            decision: None,
            failure: None,
        })
    }

    pub fn responder(coins: C, input: I, policy: EpsilonPolicy) -> Result<Self, ProtocolError> {
        let (epsilon, k) = match policy {
            EpsilonPolicy::Require(e) => (Some(e), Some(validated_epsilon(e)?)),
            EpsilonPolicy::AcceptOffered => (None, None),
        };
        Ok(Session {
            role: Role::Responder,
            phase: Phase::Init,
            coins,
            input,
            policy,
            epsilon,
            k,
            bits_charged: 0,
            local_length: None,
            decision: None,
            failure: None,
        })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn bits_charged(&self) -> u64 {
        self.bits_charged
    }

    pub fn failure(&self) -> Option<&ProtocolError> {
        self.failure.as_ref()
    }

    pub fn take_failure(&mut self) -> Option<ProtocolError> {
        self.failure.take()
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.phase, Phase::Done | Phase::Failed)
    }

    /// Opening messages. Only the initiator speaks first.
    pub fn start(&mut self) -> Vec<ProtocolMessage> {
        match (self.role, self.phase) {
            (Role::Initiator, Phase::Init) => vec![self.hello()],
            _ => Vec::new(),
        }
    }

    fn hello(&self) -> ProtocolMessage {
        ProtocolMessage::Hello {
            epsilon: self.epsilon.expect("epsilon settled before HELLO"),
            seed_id: self.coins.seed_id(),
        }
    }

    /// Moves to `Failed`, returning the ERROR frame to notify the peer with
    /// (none when the peer itself aborted).
    fn fail(&mut self, err: ProtocolError) -> Vec<ProtocolMessage> {
        let notify = match (&err, err.code()) {
            (ProtocolError::Remote { .. }, _) | (_, None) => Vec::new(),
            (e, Some(code)) => vec![ProtocolMessage::Error {
                code,
                text: e.to_string(),
            }],
        };
        self.phase = Phase::Failed;
        self.failure = Some(err);
        notify
    }

    /// Undecodable bytes from the peer.
    pub fn handle_decode_error(&mut self, err: DecodeError) -> Vec<ProtocolMessage> {
        if self.is_finished() {
            return Vec::new();
        }
        self.fail(ProtocolError::Framing(err))
    }

    /// Transport failure observed by the driver.
    pub fn handle_transport_error(&mut self, err: io::Error) {
        if !self.is_finished() {
            self.fail(ProtocolError::Transport(err));
        }
    }

    fn check_hello(&mut self, epsilon: f64, seed_id: SeedId) -> Result<(), ProtocolError> {
        let local = self.coins.seed_id();
        if seed_id != local {
            return Err(ProtocolError::SeedMismatch {
                local,
                remote: seed_id,
            });
        }
        match self.policy {
            EpsilonPolicy::Require(e) if e.to_bits() != epsilon.to_bits() => Err(
                ProtocolError::ParamMismatch(format!("local epsilon {e:e}, peer epsilon {epsilon:e}")),
            ),
            EpsilonPolicy::Require(_) => Ok(()),
            EpsilonPolicy::AcceptOffered => {
                self.k = Some(validated_epsilon(epsilon)?);
                self.epsilon = Some(epsilon);
                Ok(())
            }
        }
    }

    fn local_fingerprint(&mut self) -> Result<RtwFingerprint, ProtocolError> {
        let k = self.k.expect("k settled");
        let local = self
            .input
            .fingerprint(&self.coins, k)
            .map_err(ProtocolError::Input)?;
        self.local_length = Some(local.length);
        Ok(local.fingerprint)
    }

    /// Feeds one message from the peer; returns the messages to send back.
    pub fn handle(&mut self, msg: ProtocolMessage) -> Vec<ProtocolMessage> {
        if self.is_finished() {
            return Vec::new();
        }
        if let ProtocolMessage::Error { code, text } = msg {
            return self.fail(ProtocolError::Remote { code, text });
        }
        match (self.role, self.phase, msg) {
            (Role::Initiator, Phase::Init, ProtocolMessage::Hello { epsilon, seed_id }) => {
                if let Err(e) = self.check_hello(epsilon, seed_id) {
                    return self.fail(e);
                }
                self.phase = Phase::HelloExchanged;
                let fp = match self.local_fingerprint() {
                    Ok(fp) => fp,
                    Err(e) => return self.fail(e),
                };
                self.bits_charged += fp.k() as u64;
                self.phase = Phase::FingerprintSent;
                vec![ProtocolMessage::Fingerprint {
                    values: fp.values().clone(),
                }]
            }
            (Role::Initiator, Phase::FingerprintSent, ProtocolMessage::Verdict { decision }) => {
                self.decision = Some(decision);
                self.phase = Phase::Done;
                Vec::new()
            }
            (Role::Responder, Phase::Init, ProtocolMessage::Hello { epsilon, seed_id }) => {
                if let Err(e) = self.check_hello(epsilon, seed_id) {
                    return self.fail(e);
                }
                self.phase = Phase::HelloExchanged;
                vec![self.hello()]
            }
            (Role::Responder, Phase::HelloExchanged, ProtocolMessage::Fingerprint { values }) => {
                let k = self.k.expect("k settled");
                if values.len() != k {
                    return self.fail(ProtocolError::ParamMismatch(format!(
                        "expected k = {k}, peer sent k = {}",
                        values.len()
                    )));
                }
                self.bits_charged += k as u64;
                let own = match self.local_fingerprint() {
                    Ok(fp) => fp,
                    Err(e) => return self.fail(e),
                };
                let theirs = RtwFingerprint::new(values, self.coins.seed_id(), self.epsilon);
                let decision = match check_equal_relations(&own, &theirs) {
                    Ok(EqualRelations::Holds) => Decision::EqualPresumed,
                    Ok(EqualRelations::Violated) => Decision::Different,
                    Err(e) => return self.fail(ProtocolError::ParamMismatch(e.to_string())),
                };
                self.decision = Some(decision);
                self.phase = Phase::Done;
                vec![ProtocolMessage::Verdict { decision }]
            }
            (_, phase, msg) => self.fail(ProtocolError::OutOfPhase {
                phase,
                kind: msg.kind_name(),
            }),
        }
    }

    /// The verdict once `Done`; `transport_bytes` is filled in by the driver.
    pub fn verdict(&self) -> Option<VerificationVerdict> {
        if self.phase != Phase::Done {
            return None;
        }
        Some(VerificationVerdict {
            decision: self.decision?,
            epsilon: self.epsilon?,
            k: self.k?,
            bits_communicated: self.bits_charged,
            transport_bytes: 0,
            local_length: self.local_length.unwrap_or(0),
            lengths_known: None,
        })
    }
}
