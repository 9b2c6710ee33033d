//! A full protocol session between two in-process parties, passing the
//! encoded frames through memory.
//!
//!     cargo run --example loopback_session

use std::io::{self, Write};

use noise_verify::protocol::loopback_session;
use noise_verify::CoinSeed;

pub fn run(out: &mut dyn Write) -> io::Result<()> {
    let coins = CoinSeed::from_u64(7);
    let alice: Vec<u8> = (0..1_000_000u32).map(|i| (i % 251) as u8).collect();
    let mut bob = alice.clone();

    for (label, bob_input) in [("identical", bob.clone()), ("one bit flipped", {
        bob[123_456] ^= 0x10;
        bob.clone()
    })] {
        let outcome = loopback_session(&coins, alice.as_slice(), bob_input.as_slice(), 1e-25)
            .expect("valid epsilon");
        let v = outcome.responder.expect("session completes");
        writeln!(
            out,
            "{label:<16} decision {:<15} k {} bits_communicated {} transport_bytes {} (lengths {:?})",
            v.decision.to_string(),
            v.k,
            v.bits_communicated,
            v.transport_bytes,
            v.lengths_known
        )?;
    }
    Ok(())
}

fn main() -> io::Result<()> {
    run(&mut io::stdout())
}
