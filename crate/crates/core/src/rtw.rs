//! Random telegraph wave (RTW) sequences and string fingerprints.
//!
//! A string `s` of length `L` is fingerprinted by multiplying, component
//! by component, the `k`-long sequences `R_{1,s[1]}, R_{2,s[2]}, ...,
//! R_{L,s[L]}` drawn from the common coin. Two parties with the same coin
//! and the same string always get the same fingerprint; for different
//! strings each component agrees with probability exactly 1/2.

use std::fmt;
use std::io::{self, Read};

use thiserror::Error;

use crate::bits::{byte_signs, words_for, BitString, Sign, SignVector};
use crate::coin::{CoinSource, SeedId};

#[derive(Debug, Error, PartialEq)]
pub enum RtwError {
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    EpsilonDomain(f64),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("fingerprint sizes differ: k = {left} vs k = {right}")]
    KMismatch { left: usize, right: usize },
    #[error("hyperspace product of zero sequences")]
    NoFactors,
}

/// Smallest integer `k` with `k > log2(1 / epsilon)`, i.e. the smallest `k`
/// with `2^-k < epsilon`.
pub fn compute_k(epsilon: f64) -> Result<usize, RtwError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(RtwError::EpsilonDomain(epsilon));
    }
    // Start from the floating-point estimate, then settle it with exact
    // power-of-two comparisons.
    let mut k = (-epsilon.log2()).floor().max(0.0) as i32 + 1;
    let below = |k: i32| libm::ldexp(1.0, -k) < epsilon;
    while !below(k) {
        k += 1;
    }
    while k > 1 && below(k - 1) {
        k -= 1;
    }
    Ok(k as usize)
}

/// A `k`-long RTW prefix `R(1), ..., R(k)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RtwSequence(SignVector);

impl RtwSequence {
    pub fn new(values: SignVector) -> Self {
        RtwSequence(values)
    }

    pub fn from_i8s(values: &[i8]) -> Option<Self> {
        SignVector::from_i8s(values).map(RtwSequence)
    }

    /// `R_{position, branch}(1..=k)` from the coin.
    pub fn derive<C: CoinSource + ?Sized>(coins: &C, position: u64, branch: Sign, k: usize) -> Self {
        let words = (0..words_for(k) as u64)
            .map(|block| coins.rtw_word(position, branch, block))
            .collect();
        RtwSequence(SignVector::from_minus_words(words, k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &SignVector {
        &self.0
    }

    pub fn into_values(self) -> SignVector {
        self.0
    }
}

/// `(a_1 b_1, ..., a_k b_k)`.
pub fn componentwise_product(a: &RtwSequence, b: &RtwSequence) -> Result<RtwSequence, RtwError> {
    if a.len() != b.len() {
        return Err(RtwError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut out = a.0.clone();
    out.mul_assign_words(b.0.minus_words());
    Ok(RtwSequence(out))
}

/// `W(j) = prod_i R_i(j)` over all inputs. The result is again an RTW.
pub fn rtw_hyperspace_product(seqs: &[RtwSequence]) -> Result<RtwSequence, RtwError> {
    let (first, rest) = seqs.split_first().ok_or(RtwError::NoFactors)?;
    rest.iter()
        .try_fold(first.clone(), |acc, s| componentwise_product(&acc, s))
}

/// A fingerprint `S*`: the only payload that crosses the channel.
#[derive(Clone, PartialEq, Debug)]
pub struct RtwFingerprint {
    values: SignVector,
    seed_id: SeedId,
    epsilon: Option<f64>,
}

impl RtwFingerprint {
    pub fn new(values: SignVector, seed_id: SeedId, epsilon: Option<f64>) -> Self {
        RtwFingerprint {
            values,
            seed_id,
            epsilon,
        }
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &SignVector {
        &self.values
    }

    pub fn seed_id(&self) -> SeedId {
        self.seed_id
    }

    /// The error bound the fingerprint was sized for, when it was sized from one.
    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// The same fingerprint restricted to its first `k` components.
    pub fn prefix(&self, k: usize) -> RtwFingerprint {
        RtwFingerprint {
            values: self.values.prefix(k),
            seed_id: self.seed_id,
            epsilon: None,
        }
    }
}

/// Streaming fingerprint computation with `O(k)` state.
///
/// Positions are consumed in increasing order; every pushed bit multiplies
/// the accumulator by `R_{i, bit}`.
pub struct FingerprintAccumulator<C> {
    coins: C,
    k: usize,
    acc: Vec<u64>,
    position: u64,
}

impl<C: CoinSource> FingerprintAccumulator<C> {
    pub fn new(coins: C, k: usize) -> Self {
        FingerprintAccumulator {
            coins,
            k,
            acc: vec![0; words_for(k)],
            position: 0,
        }
    }

    pub fn push(&mut self, bit: Sign) {
        self.position += 1;
        for (block, w) in self.acc.iter_mut().enumerate() {
            *w ^= self.coins.rtw_word(self.position, bit, block as u64);
        }
    }

    pub fn push_bytes(&mut self, bytes: &[u8]) {
        for s in byte_signs(bytes) {
            self.push(s);
        }
    }

    /// Feeds a whole reader through, returning the number of bytes consumed.
    pub fn push_reader<R: Read>(&mut self, mut reader: R) -> io::Result<u64> {
        let mut buf = vec![0u8; 64 * 1024];
        let mut total = 0u64;
        loop {
            let n = match reader.read(&mut buf) {
                Ok(0) => return Ok(total),
                Ok(n) => n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            };
            self.push_bytes(&buf[..n]);
            total += n as u64;
        }
    }

    /// Number of string positions consumed so far.
    pub fn positions(&self) -> u64 {
        self.position
    }

    pub fn finish(self, epsilon: Option<f64>) -> RtwFingerprint {
        RtwFingerprint {
            values: SignVector::from_minus_words(self.acc, self.k),
            seed_id: self.coins.seed_id(),
            epsilon,
        }
    }
}

/// Fingerprint sized for error bound `epsilon`.
pub fn fingerprint<C: CoinSource>(
    s: &BitString,
    coins: C,
    epsilon: f64,
) -> Result<RtwFingerprint, RtwError> {
    let k = compute_k(epsilon)?;
    let mut acc = FingerprintAccumulator::new(coins, k);
    s.iter().for_each(|b| acc.push(b));
    Ok(acc.finish(Some(epsilon)))
}

/// Fingerprint with an explicit component count.
pub fn fingerprint_k<C: CoinSource>(s: &BitString, coins: C, k: usize) -> RtwFingerprint {
    let mut acc = FingerprintAccumulator::new(coins, k);
    s.iter().for_each(|b| acc.push(b));
    acc.finish(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualRelations {
    Holds,
    Violated,
}

/// Tests `wA(j) - wB(j) = 0` and `wA(j) wB(j) = 1` for every component.
pub fn check_equal_relations(
    a: &RtwFingerprint,
    b: &RtwFingerprint,
) -> Result<EqualRelations, RtwError> {
    if a.k() != b.k() {
        return Err(RtwError::KMismatch {
            left: a.k(),
            right: b.k(),
        });
    }
    let mut difference_zero = true;
    let mut product_one = true;
    for (x, y) in a.values.iter().zip(b.values.iter()) {
        difference_zero &= x.value() - y.value() == 0;
        product_one &= x.value() * y.value() == 1;
    }
    assert_eq!(
        difference_zero, product_one,
        "difference and product comparators disagree"
    );
    Ok(if difference_zero {
        EqualRelations::Holds
    } else {
        EqualRelations::Violated
    })
}

/// A `k`-bit digest: fingerprint components packed MSB-first, `+1` as 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Digest {
    bytes: Vec<u8>,
    k: usize,
}

impl Digest {
    pub fn from_fingerprint(fp: &RtwFingerprint) -> Self {
        Digest {
            bytes: fp.values.pack_msb_first(),
            k: fp.k(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(&self.bytes))
    }
}

/// Keyed universal hash of a byte stream.
pub fn hash_digest<C: CoinSource>(bytes: &[u8], coins: C, k: usize) -> Result<Digest, RtwError> {
    if k == 0 {
        return Err(RtwError::ZeroK);
    }
    let mut acc = FingerprintAccumulator::new(coins, k);
    acc.push_bytes(bytes);
    Ok(Digest::from_fingerprint(&acc.finish(None)))
}

/// [`hash_digest`] over a reader.
pub fn hash_digest_reader<C: CoinSource, R: Read>(
    reader: R,
    coins: C,
    k: usize,
) -> io::Result<Digest> {
    if k == 0 {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, RtwError::ZeroK));
    }
    let mut acc = FingerprintAccumulator::new(coins, k);
    acc.push_reader(reader)?;
    Ok(Digest::from_fingerprint(&acc.finish(None)))
}
