//! Exact false-accept probabilities by enumerating every coin table, and
//! the GF(2) inner-product strategy the RTW protocol is a variant of.

use std::fmt;

use num_rational::Ratio;

use crate::analysis::AnalysisError;
use crate::bits::{BitString, Sign};
use crate::coin::CoinTable;
use crate::rtw::fingerprint_k;

/// Largest `2 L k` (coin bits per table) the enumerators accept.
pub const MAX_TABLE_BITS: usize = 18;

#[derive(Debug, Clone, PartialEq)]
pub struct PairProbability {
    pub s: BitString,
    pub s_prime: BitString,
    /// Tables under which the two fingerprints coincide.
    pub equal_tables: u64,
    pub probability: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub length: usize,
    pub k: usize,
    pub tables: u64,
    /// Every ordered pair of distinct strings.
    pub pairs: Vec<PairProbability>,
    /// Rejections of equal pairs summed over all strings and tables.
    pub equal_pair_rejections: u64,
}

impl OracleReport {
    /// The single probability shared by all unequal pairs, if they agree.
    pub fn uniform_probability(&self) -> Option<Ratio<u64>> {
        let first = self.pairs.first()?.probability;
        self.pairs
            .iter()
            .all(|p| p.probability == first)
            .then_some(first)
    }

    pub fn max_probability(&self) -> Option<Ratio<u64>> {
        self.pairs.iter().map(|p| p.probability).max()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "exhaustive oracle: L = {}, k = {}, {} coin tables, {} unequal ordered pairs",
            self.length,
            self.k,
            self.tables,
            self.pairs.len()
        )?;
        match self.uniform_probability() {
            Some(p) => writeln!(f, "false-accept probability for every unequal pair: {p}")?,
            None => {
                for p in &self.pairs {
                    writeln!(
                        f,
                        "  {} vs {}: {}",
                        fmt_string(&p.s),
                        fmt_string(&p.s_prime),
                        p.probability
                    )?;
                }
            }
        }
        write!(f, "equal-pair rejections: {}", self.equal_pair_rejections)
    }
}

fn fmt_string(s: &BitString) -> String {
    s.iter().map(|b| if b.is_minus() { '-' } else { '+' }).collect()
}

fn check_bounds(length: usize, k: usize) -> Result<(), AnalysisError> {
    if length == 0 || k == 0 || length > 3 || k > 3 || 2 * length * k > MAX_TABLE_BITS {
        return Err(AnalysisError::SizeBound { length, k });
    }
    Ok(())
}

/// All `2^L` strings, string number `n` having bit `i` set for `-1`.
pub fn all_strings(length: usize) -> Vec<BitString> {
    (0..1u32 << length)
        .map(|n| BitString::from_signs((0..length).map(|i| Sign::from_bit(n >> i & 1 == 0))))
        .collect()
}

/// Enumerates all `2^(2Lk)` coin tables and, for each ordered pair of
/// distinct strings, counts the tables giving equal fingerprints.
pub fn exhaustive_oracle(length: usize, k: usize) -> Result<OracleReport, AnalysisError> {
    check_bounds(length, k)?;
    let strings = all_strings(length);
    let tables = 1u64 << (2 * length * k);
    let mut equal = vec![vec![0u64; strings.len()]; strings.len()];
    let mut equal_pair_rejections = 0u64;
    for index in 0..tables {
        let table = CoinTable::from_index(length, k, index);
        let fps: Vec<_> = strings.iter().map(|s| fingerprint_k(s, &table, k)).collect();
        for (a, fa) in fps.iter().enumerate() {
            // Recompute for the equal pair rather than reuse `fa`.
            if fingerprint_k(&strings[a], &table, k) != *fa {
                equal_pair_rejections += 1;
            }
            for (b, fb) in fps.iter().enumerate() {
                if a != b && fa.values() == fb.values() {
                    equal[a][b] += 1;
                }
            }
        }
    }
    Ok(OracleReport {
        length,
        k,
        tables,
        pairs: collect_pairs(&strings, &equal, tables),
        equal_pair_rejections,
    })
}

fn collect_pairs(strings: &[BitString], equal: &[Vec<u64>], tables: u64) -> Vec<PairProbability> {
    let mut pairs = Vec::new();
    for (a, s) in strings.iter().enumerate() {
        for (b, t) in strings.iter().enumerate() {
            if a != b {
                pairs.push(PairProbability {
                    s: s.clone(),
                    s_prime: t.clone(),
                    equal_tables: equal[a][b],
                    probability: Ratio::new(equal[a][b], tables),
                });
            }
        }
    }
    pairs
}

/// `k` random vectors over GF(2), `L` entries each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Table {
    length: usize,
    vectors: Vec<Vec<u8>>,
}

impl Gf2Table {
    pub fn new(vectors: Vec<Vec<u8>>) -> Self {
        let length = vectors.first().map_or(0, Vec::len);
        assert!(vectors.iter().all(|v| v.len() == length && v.iter().all(|&x| x <= 1)));
        Gf2Table { length, vectors }
    }

    /// Table number `index` out of `2^(Lk)`: entry `i` of vector `j` is
    /// bit `j * L + i`.
    pub fn from_index(length: usize, k: usize, index: u64) -> Self {
        let vectors = (0..k)
            .map(|j| (0..length).map(|i| (index >> (j * length + i) & 1) as u8).collect())
            .collect();
        Gf2Table { length, vectors }
    }

    /// The GF(2) vectors hidden in an RTW coin table: `r_j[i]` is 1 iff
    /// `R_{i,-1}(j)` and `R_{i,+1}(j)` differ. With these, the RTW
    /// fingerprint equals a fixed offset plus the vector of parities.
    pub fn from_coin_table(table: &CoinTable) -> Self {
        let vectors = (1..=table.k() as u64)
            .map(|j| {
                (1..=table.positions() as u64)
                    .map(|i| (table.get(i, Sign::Minus, j) != table.get(i, Sign::Plus, j)) as u8)
                    .collect()
            })
            .collect();
        Gf2Table {
            length: table.positions(),
            vectors,
        }
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }
}

/// `x = (1 - s) / 2`: `+1 -> 0`, `-1 -> 1`.
pub fn to_gf2(s: &BitString) -> Vec<u8> {
    s.iter().map(|b| b.is_minus() as u8).collect()
}

fn gf2_dot(x: &[u8], r: &[u8]) -> u8 {
    x.iter().zip(r).fold(0, |acc, (a, b)| acc ^ (a & b))
}

/// True iff all `k` parity checks `<x, r_j>` and `<x', r_j>` agree.
pub fn gf2_baseline(s: &BitString, s_prime: &BitString, table: &Gf2Table) -> bool {
    assert_eq!(s.len(), table.length);
    assert_eq!(s_prime.len(), table.length);
    let (x, y) = (to_gf2(s), to_gf2(s_prime));
    table.vectors.iter().all(|r| gf2_dot(&x, r) == gf2_dot(&y, r))
}

/// [`exhaustive_oracle`] for the GF(2) strategy, over all `2^(Lk)` tables.
pub fn gf2_exhaustive(length: usize, k: usize) -> Result<OracleReport, AnalysisError> {
    check_bounds(length, k)?;
    let strings = all_strings(length);
    let tables = 1u64 << (length * k);
    let mut equal = vec![vec![0u64; strings.len()]; strings.len()];
    let mut equal_pair_rejections = 0u64;
    for index in 0..tables {
        let table = Gf2Table::from_index(length, k, index);
        for (a, s) in strings.iter().enumerate() {
            if !gf2_baseline(s, s, &table) {
                equal_pair_rejections += 1;
            }
            for (b, t) in strings.iter().enumerate() {
                if a != b && gf2_baseline(s, t, &table) {
                    equal[a][b] += 1;
                }
            }
        }
    }
    Ok(OracleReport {
        length,
        k,
        tables,
        pairs: collect_pairs(&strings, &equal, tables),
        equal_pair_rejections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_bound_enforced() {
        assert!(exhaustive_oracle(4, 1).is_err());
        assert!(exhaustive_oracle(3, 4).is_err());
        assert!(exhaustive_oracle(0, 1).is_err());
        assert!(gf2_exhaustive(1, 0).is_err());
        assert!(exhaustive_oracle(3, 3).is_ok());
    }

    #[test]
    fn single_bit_single_component() {
        let r = exhaustive_oracle(1, 1).unwrap();
        assert_eq!(r.tables, 4);
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.uniform_probability(), Some(Ratio::new(1, 2)));
        assert_eq!(r.equal_pair_rejections, 0);
    }

    #[test]
    fn gf2_equal_strings_agree() {
        let t = Gf2Table::new(vec![vec![1, 0, 1], vec![1, 1, 1]]);
        let s = BitString::from_i8s(&[1, -1, -1]).unwrap();
        assert!(gf2_baseline(&s, &s, &t));
        assert_eq!(t.k(), 2);
    }

    #[test]
    fn gf2_single_check_halves() {
        // Per parity check, a nonzero difference vector is caught by exactly
        // half of all r.
        let r = gf2_exhaustive(3, 1).unwrap();
        assert_eq!(r.uniform_probability(), Some(Ratio::new(1, 2)));
    }
}
