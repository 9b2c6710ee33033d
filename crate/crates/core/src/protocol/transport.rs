//! Drivers that run sessions over byte channels.

use std::collections::VecDeque;
use std::io::{self, Read, Write};
use std::sync::mpsc;

use crate::coin::CoinSource;
use crate::protocol::session::{
    EpsilonPolicy, FingerprintInput, ProtocolError, Session, VerificationVerdict,
};
use crate::protocol::wire::{self, read_frame, write_frame, DecodeError, ReadFrameError};

/// Runs a session to completion over a reliable ordered byte channel.
pub fn drive<C, I, T>(session: &mut Session<C, I>, channel: &mut T) -> Result<VerificationVerdict, ProtocolError>
where
    C: CoinSource,
    I: FingerprintInput,
    T: Read + Write,
{
    let mut transport_bytes = 0u64;
    let mut outbox = session.start();
    loop {
        for msg in outbox.drain(..) {
            match write_frame(&mut *channel, &msg) {
                Ok(n) => transport_bytes += n as u64,
                Err(e) => {
                    session.handle_transport_error(e);
                    break;
                }
            }
        }
        if session.is_finished() {
            break;
        }
        match read_frame(&mut *channel) {
            Ok((msg, n)) => {
                transport_bytes += n as u64;
                outbox = session.handle(msg);
            }
            Err(ReadFrameError::Decode(e)) => outbox = session.handle_decode_error(e),
            Err(ReadFrameError::Io(e)) => session.handle_transport_error(e),
        }
    }
    match session.verdict() {
        Some(mut v) => {
            v.transport_bytes = transport_bytes;
            Ok(v)
        }
        None => Err(session
            .take_failure()
            .expect("finished session without verdict has a failure")),
    }
}

/// Alice's side: announce parameters, send the fingerprint, read the verdict.
pub fn run_initiator<C, I, T>(
    coins: C,
    input: I,
    epsilon: f64,
    channel: &mut T,
) -> Result<VerificationVerdict, ProtocolError>
where
    C: CoinSource,
    I: FingerprintInput,
    T: Read + Write,
{
    let mut session = Session::initiator(coins, input, epsilon)?;
    drive(&mut session, channel)
}

/// Bob's side: answer HELLO, compare the received fingerprint, send the verdict.
pub fn run_responder<C, I, T>(
    coins: C,
    input: I,
    policy: EpsilonPolicy,
    channel: &mut T,
) -> Result<VerificationVerdict, ProtocolError>
where
    C: CoinSource,
    I: FingerprintInput,
    T: Read + Write,
{
    let mut session = Session::responder(coins, input, policy)?;
    drive(&mut session, channel)
}

/// Both outcomes of an in-process session.
#[derive(Debug)]
pub struct LoopbackOutcome {
    pub initiator: Result<VerificationVerdict, ProtocolError>,
    pub responder: Result<VerificationVerdict, ProtocolError>,
}

fn pump<C: CoinSource, I: FingerprintInput>(
    session: &mut Session<C, I>,
    inbox: &mut VecDeque<u8>,
    outbox: &mut VecDeque<u8>,
    bytes: &mut u64,
) -> bool {
    let mut progressed = false;
    loop {
        if session.is_finished() {
            return progressed;
        }
        let buf = inbox.make_contiguous();
        let replies = match wire::decode_prefix(buf) {
            Ok((msg, used)) => {
                inbox.drain(..used);
                *bytes += used as u64;
                session.handle(msg)
            }
            Err(DecodeError::Truncated { .. }) => return progressed,
            Err(e) => {
                inbox.clear();
                session.handle_decode_error(e)
            }
        };
        progressed = true;
        for msg in replies {
            let frame = wire::encode(&msg);
            *bytes += frame.len() as u64;
            outbox.extend(frame);
        }
    }
}

fn finish<C: CoinSource, I: FingerprintInput>(
    s: &mut Session<C, I>,
    bytes: u64,
) -> Result<VerificationVerdict, ProtocolError> {
    match s.verdict() {
        Some(mut v) => {
            v.transport_bytes = bytes;
            Ok(v)
        }
        None => Err(s.take_failure().unwrap_or_else(|| {
            ProtocolError::Transport(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                "peer stopped before the session finished",
            ))
        })),
    }
}

/// Runs initiator and responder against each other in one thread, passing
/// encoded frames through in-memory byte queues.
pub fn loopback<CA, IA, CB, IB>(
    mut initiator: Session<CA, IA>,
    mut responder: Session<CB, IB>,
) -> LoopbackOutcome
where
    CA: CoinSource,
    IA: FingerprintInput,
    CB: CoinSource,
    IB: FingerprintInput,
{
    let mut to_responder = VecDeque::new();
    let mut to_initiator = VecDeque::new();
    let (mut bytes_a, mut bytes_b) = (0u64, 0u64);
    for msg in initiator.start() {
        let frame = wire::encode(&msg);
        bytes_a += frame.len() as u64;
        to_responder.extend(frame);
    }
    loop {
        let b = pump(&mut responder, &mut to_responder, &mut to_initiator, &mut bytes_b);
        let a = pump(&mut initiator, &mut to_initiator, &mut to_responder, &mut bytes_a);
        if !a && !b {
            break;
        }
    }
    let mut a = finish(&mut initiator, bytes_a);
    let mut b = finish(&mut responder, bytes_b);
    if let (Ok(va), Ok(vb)) = (&mut a, &mut b) {
        let lengths = Some((va.local_length, vb.local_length));
        va.lengths_known = lengths;
        vb.lengths_known = lengths;
    }
    LoopbackOutcome {
        initiator: a,
        responder: b,
    }
}

/// Convenience wrapper: equal seeds on both ends, responder requires the
/// same epsilon.
pub fn loopback_session<C, IA, IB>(coins: C, a: IA, b: IB, epsilon: f64) -> Result<LoopbackOutcome, ProtocolError>
where
    C: CoinSource + Clone,
    IA: FingerprintInput,
    IB: FingerprintInput,
{
    let initiator = Session::initiator(coins.clone(), a, epsilon)?;
    let responder = Session::responder(coins, b, EpsilonPolicy::Require(epsilon))?;
    Ok(loopback(initiator, responder))
}

/// One end of an in-memory duplex byte pipe, for running the blocking
/// drivers on two threads.
pub struct PipeEnd {
    tx: mpsc::Sender<Vec<u8>>,
    rx: mpsc::Receiver<Vec<u8>>,
    pending: VecDeque<u8>,
}

pub fn pipe() -> (PipeEnd, PipeEnd) {
    let (tx_a, rx_b) = mpsc::channel();
    let (tx_b, rx_a) = mpsc::channel();
    (
        PipeEnd {
            tx: tx_a,
            rx: rx_a,
            pending: VecDeque::new(),
        },
        PipeEnd {
            tx: tx_b,
            rx: rx_b,
            pending: VecDeque::new(),
        },
    )
}

impl Read for PipeEnd {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        if buf.is_empty() {
            return Ok(0);
        }
        if self.pending.is_empty() {
            match self.rx.recv() {
                Ok(chunk) => self.pending.extend(chunk),
                // Peer hung up: end of stream.
                Err(_) => return Ok(0),
            }
        }
        let n = buf.len().min(self.pending.len());
        for (dst, src) in buf.iter_mut().zip(self.pending.drain(..n)) {
            *dst = src;
        }
        Ok(n)
    }
}

impl Write for PipeEnd {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.tx
            .send(buf.to_vec())
            .map_err(|_| io::Error::new(io::ErrorKind::BrokenPipe, "peer hung up"))?;
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}
