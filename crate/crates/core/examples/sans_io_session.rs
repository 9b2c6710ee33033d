//! Driving the session state machines by hand: every message is shown
//! as its wire frame.
//!
//!     cargo run --example sans_io_session

use std::io::{self, Write};

use noise_verify::protocol::{decode, encode, EpsilonPolicy, Session};
use noise_verify::{BitString, CoinSeed};

pub fn run(out: &mut dyn Write) -> io::Result<()> {
    let coins = CoinSeed::from_u64(5);
    let s = BitString::from_i8s(&[1, -1, -1, 1, 1]).unwrap();
    let mut alice = Session::initiator(&coins, s.clone(), 0.01).unwrap();
    let mut bob = Session::responder(&coins, s, EpsilonPolicy::Require(0.01)).unwrap();

    let mut to_bob = alice.start();
    while !(alice.is_finished() && bob.is_finished()) {
        let mut to_alice = Vec::new();
        for msg in to_bob.drain(..) {
            let frame = encode(&msg);
            writeln!(out, "alice -> bob  {:<11} {}", msg.kind_name(), hex::encode(&frame))?;
            to_alice.extend(bob.handle(decode(&frame).unwrap()));
        }
        for msg in to_alice {
            let frame = encode(&msg);
            writeln!(out, "bob -> alice  {:<11} {}", msg.kind_name(), hex::encode(&frame))?;
            to_bob.extend(alice.handle(decode(&frame).unwrap()));
        }
        if to_bob.is_empty() && alice.is_finished() {
            break;
        }
    }
    let v = alice.verdict().expect("alice finished");
    writeln!(out, "verdict {} after {} fingerprint bits", v.decision, alice.bits_charged())
}

fn main() -> io::Result<()> {
    run(&mut io::stdout())
}
