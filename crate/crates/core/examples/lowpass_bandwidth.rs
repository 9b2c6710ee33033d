//! Multiplying band-limited noises widens the band: the correlation time
//! of a product of N filtered noises is about 1/N of one of them.
//!
//!     cargo run --release --example lowpass_bandwidth

use std::io::{self, Write};

use noise_verify::analysis::bandwidth_experiment;
use noise_verify::CoinSeed;

pub fn run(out: &mut dyn Write, n: usize) -> io::Result<()> {
    let seed = CoinSeed::from_u64(8);
    for factors in [1, 2, 4, 8] {
        let r = bandwidth_experiment(&seed, factors, n, 1000.0, 10.0).unwrap();
        writeln!(out, "N = {factors}: {r}")?;
    }
    Ok(())
}

fn main() -> io::Result<()> {
    run(&mut io::stdout(), 200_000)
}
