//! Keyed k-bit digests of byte strings, and how often two strings that
//! differ in one bit collide over many seeds.
//!
//!     cargo run --example digest

use std::io::{self, Write};

use noise_verify::{hash_digest, CoinSeed};

pub fn run(out: &mut dyn Write, seeds: u64) -> io::Result<()> {
    let coins = CoinSeed::from_u64(2024);
    let a = b"the quick brown fox jumps over the lazy dog".to_vec();
    let mut b = a.clone();
    b[10] ^= 0x01;

    for k in [8, 16, 32] {
        let da = hash_digest(&a, &coins, k).unwrap();
        let db = hash_digest(&b, &coins, k).unwrap();
        writeln!(out, "k = {k:>2}: {da} vs {db}")?;
    }
    writeln!(out, "empty input, k = 8: {}", hash_digest(b"", &coins, 8).unwrap())?;

    let k = 8;
    let collisions = (0..seeds)
        .filter(|&i| {
            let c = CoinSeed::from_u64(i);
            hash_digest(&a, &c, k).unwrap() == hash_digest(&b, &c, k).unwrap()
        })
        .count();
    writeln!(
        out,
        "one-bit difference, k = {k}: {collisions} collisions in {seeds} seeds ({:.5}, expected {:.5})",
        collisions as f64 / seeds as f64,
        1.0 / 256.0
    )
}

fn main() -> io::Result<()> {
    run(&mut io::stdout(), 100_000)
}
