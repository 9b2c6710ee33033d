//! How long the fingerprint takes over a slow link compared with sending
//! the whole string.
//!
//!     cargo run --example scenario

use std::io::{self, Write};

use noise_verify::analysis::scenario_report;

pub fn run(out: &mut dyn Write) -> io::Result<()> {
    // A terabit string over a 1 kbit/s channel.
    writeln!(out, "{}", scenario_report(1_000_000_000_000, 1e3, 1e-25).unwrap())?;
    writeln!(out)?;
    writeln!(out, "{}", scenario_report(8 * (1 << 30), 1e6, 1e-9).unwrap())
}

fn main() -> io::Result<()> {
    run(&mut io::stdout())
}
