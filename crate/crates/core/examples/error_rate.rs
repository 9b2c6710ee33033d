//! Monte Carlo false-accept rates for random unequal strings against 2^-k.
//!
//!     cargo run --release --example error_rate

use std::io::{self, Write};

use noise_verify::analysis::{mc_error_rates, render_trials, Format};

pub fn run(out: &mut dyn Write, trials: u64) -> io::Result<()> {
    let ks: Vec<usize> = (1..=10).collect();
    for length in [1, 16, 1024] {
        let reports = mc_error_rates(&ks, length, trials, true, 11).unwrap();
        write!(out, "{}", render_trials(&reports, Format::Text))?;
    }
    Ok(())
}

fn main() -> io::Result<()> {
    run(&mut io::stdout(), 100_000)
}
