//! The Gaussian-noise variant: strings become products of continuum
//! noises and are compared sample by sample.
//!
//!     cargo run --example continuum_compare

use std::io::{self, Write};

use noise_verify::analysis::{continuum_report, false_accept_after_m};
use noise_verify::CoinSeed;

pub fn run(out: &mut dyn Write, trials: u64) -> io::Result<()> {
    writeln!(out, "{}", continuum_report(&CoinSeed::from_u64(1), 256, 10_000, 1).unwrap())?;
    writeln!(out, "false accepts of the product comparator after m samples:")?;
    for r in false_accept_after_m(16, 8, trials, 2).unwrap() {
        writeln!(
            out,
            "  m={:<2} rate {:.5} expected {:.5} {}",
            r.m,
            r.rate,
            r.expected,
            if r.pass { "PASS" } else { "FAIL" }
        )?;
    }
    Ok(())
}

fn main() -> io::Result<()> {
    run(&mut io::stdout(), 20_000)
}
