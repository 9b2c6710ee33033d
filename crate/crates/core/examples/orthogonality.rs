//! Time averages of basis noises and their products against the
//! Kronecker delta.
//!
//!     cargo run --release --example orthogonality

use std::io::{self, Write};

use noise_verify::analysis::orthogonality_suite;
use noise_verify::CoinSeed;

pub fn run(out: &mut dyn Write, n: usize) -> io::Result<()> {
    let report = orthogonality_suite(&CoinSeed::from_u64(1), n).unwrap();
    writeln!(out, "{report}")
}

fn main() -> io::Result<()> {
    run(&mut io::stdout(), 1_000_000)
}
