//! Both parties over a real TCP connection on localhost.
//!
//!     cargo run --example tcp_session

use std::io::{self, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use noise_verify::protocol::{run_initiator, run_responder, EpsilonPolicy};
use noise_verify::CoinSeed;

pub fn run(out: &mut dyn Write) -> io::Result<()> {
    let coins = CoinSeed::from_u64(99);
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;

    let bob_coins = coins.clone();
    let bob = thread::spawn(move || {
        let (mut stream, _) = listener.accept().expect("accept");
        let data = vec![0xA5u8; 4096];
        // Bob takes epsilon from Alice's HELLO.
        run_responder(&bob_coins, data.as_slice(), EpsilonPolicy::AcceptOffered, &mut stream)
    });

    let mut stream = TcpStream::connect(addr)?;
    let data = vec![0xA5u8; 4096];
    let alice = run_initiator(&coins, data.as_slice(), 1e-6, &mut stream).expect("alice");
    let bob = bob.join().expect("bob thread").expect("bob");

    writeln!(out, "alice: {} k={} bits={}", alice.decision, alice.k, alice.bits_communicated)?;
    writeln!(out, "bob:   {} k={} bits={}", bob.decision, bob.k, bob.bits_communicated)?;
    Ok(())
}

fn main() -> io::Result<()> {
    run(&mut io::stdout())
}
