//! Exact false-accept probabilities for tiny instances, from every
//! possible coin table, next to the GF(2) inner-product baseline.
//!
//!     cargo run --example exhaustive_oracle

use std::io::{self, Write};

use noise_verify::analysis::{exhaustive_oracle, gf2_exhaustive};

pub fn run(out: &mut dyn Write) -> io::Result<()> {
    for (l, k) in [(1, 1), (1, 2), (2, 2), (3, 2), (3, 3)] {
        let rtw = exhaustive_oracle(l, k).unwrap();
        let gf2 = gf2_exhaustive(l, k).unwrap();
        let show = |p: Option<num_rational::Ratio<u64>>| p.map_or("not uniform".to_string(), |p| p.to_string());
        writeln!(
            out,
            "L={l} k={k}: {} tables, RTW {}, GF(2) {}, equal-pair rejections {}",
            rtw.tables,
            show(rtw.uniform_probability()),
            show(gf2.uniform_probability()),
            rtw.equal_pair_rejections
        )?;
    }
    Ok(())
}

fn main() -> io::Result<()> {
    run(&mut io::stdout())
}
