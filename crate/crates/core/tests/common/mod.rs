#![allow(dead_code)]

use std::path::PathBuf;

use noise_verify::{CoinSource, Sign};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Reads a `.hex` fixture: `#` comments and whitespace are ignored.
pub fn load_hex(name: &str) -> Vec<u8> {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    let digits: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap())
        .flat_map(|l| l.chars().filter(|c| !c.is_whitespace()))
        .collect();
    hex::decode(digits).expect("fixture is valid hex")
}

/// Fingerprint straight from the definition: component j is the product
/// over positions i of the coin R_{i, s_i}(j), as a plain +1/-1 integer.
pub fn naive_fingerprint<C: CoinSource>(coins: &C, s: &[i8], k: usize) -> Vec<i8> {
    (1..=k as u64)
        .map(|j| {
            let mut acc = 1i8;
            for (i, &bit) in s.iter().enumerate() {
                let branch = if bit < 0 { Sign::Minus } else { Sign::Plus };
                let word = coins.rtw_word(i as u64 + 1, branch, (j - 1) / 64);
                let minus = word >> ((j - 1) % 64) & 1 == 1;
                acc *= if minus { -1 } else { 1 };
            }
            acc
        })
        .collect()
}
