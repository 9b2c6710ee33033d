//! `{-1, +1}` values and packed vectors of them.
//!
//! Vectors are packed 64 components per word. A set bit marks a `-1`
//! component, so the component-wise product of two vectors is the XOR of
//! their words.

use std::fmt;
use std::ops::{Mul, Neg};

/// A single `{-1, +1}` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            -1 => Some(Sign::Minus),
            1 => Some(Sign::Plus),
            _ => None,
        }
    }

    /// `true` maps to `+1`, `false` to `-1`.
    pub fn from_bit(bit: bool) -> Sign {
        if bit {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-1",
            Sign::Plus => "+1",
        })
    }
}

pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

fn tail_mask(len: usize) -> u64 {
    match len % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Packed vector over `{-1, +1}`. Component `j` (1-based in the protocol
/// description) lives at index `j - 1`, in bit `(j - 1) % 64` of word
/// `(j - 1) / 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignVector {
    words: Vec<u64>,
    len: usize,
}

impl SignVector {
    /// The all-`+1` vector, identity of the component-wise product.
    pub fn ones(len: usize) -> Self {
        SignVector {
            words: vec![0; words_for(len)],
            len,
        }
    }

    /// Builds a vector from raw minus-bit words. Bits past `len` are cleared.
    pub fn from_minus_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(words_for(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        SignVector { words, len }
    }

    pub fn from_signs<I: IntoIterator<Item = Sign>>(signs: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        for s in signs {
            if len.is_multiple_of(64) {
                words.push(0);
            }
            if s.is_minus() {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        SignVector { words, len }
    }

    /// Parses `+1`/`-1` integers. Returns `None` on any other value.
    pub fn from_i8s(values: &[i8]) -> Option<Self> {
        values
            .iter()
            .map(|&v| Sign::from_i8(v))
            .collect::<Option<Vec<_>>>()
            .map(Self::from_signs)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> Sign {
        assert!(index < self.len, "component {index} out of range {}", self.len);
        if self.words[index / 64] >> (index % 64) & 1 == 1 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn set(&mut self, index: usize, sign: Sign) {
        assert!(index < self.len, "component {index} out of range {}", self.len);
        let bit = 1u64 << (index % 64);
        if sign.is_minus() {
            self.words[index / 64] |= bit;
        } else {
            self.words[index / 64] &= !bit;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Sign> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_i8s(&self) -> Vec<i8> {
        self.iter().map(Sign::value).collect()
    }

    pub fn minus_words(&self) -> &[u64] {
        &self.words
    }

    /// Multiplies `other` into `self` component-wise. Lengths must match.
    pub(crate) fn mul_assign_words(&mut self, other: &[u64]) {
        for (w, o) in self.words.iter_mut().zip(other) {
            *w ^= o;
        }
    }

    /// The first `len` components.
    pub fn prefix(&self, len: usize) -> SignVector {
        assert!(len <= self.len);
        SignVector::from_minus_words(self.words[..words_for(len)].to_vec(), len)
    }

    pub fn count_minus(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True iff every component is `+1`.
    pub fn is_all_plus(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Time average `<a(j) b(j)>` over the common length.
    pub fn mean_product(&self, other: &SignVector) -> f64 {
        assert_eq!(self.len, other.len);
        if self.len == 0 {
            return 0.0;
        }
        let disagree: u64 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum();
        (self.len as f64 - 2.0 * disagree as f64) / self.len as f64
    }

    /// Packs components MSB-first into bytes, `+1` as 1 and `-1` as 0.
    /// Pad bits in the last byte are zero.
    pub fn pack_msb_first(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (i, s) in self.iter().enumerate() {
            if s == Sign::Plus {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    /// Inverse of [`SignVector::pack_msb_first`]. Returns `None` when the
    /// byte count is wrong or a pad bit is set.
    pub fn unpack_msb_first(bytes: &[u8], len: usize) -> Option<SignVector> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        if !len.is_multiple_of(8) {
            let pad = 0xffu8 >> (len % 8);
            if bytes[bytes.len() - 1] & pad != 0 {
                return None;
            }
        }
        Some(SignVector::from_signs(
            (0..len).map(|i| Sign::from_bit(bytes[i / 8] & (0x80 >> (i % 8)) != 0)),
        ))
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector[")?;
        for (i, s) in self.iter().take(96).enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            f.write_str(if s.is_minus() { "-" } else { "+" })?;
        }
        if self.len > 96 {
            write!(f, " ... ({} total)", self.len)?;
        }
        write!(f, "]")
    }
}

/// An input string over `{-1, +1}`, indexed by position `i = 1..L`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString(SignVector);

impl BitString {
    pub fn from_signs<I: IntoIterator<Item = Sign>>(signs: I) -> Self {
        BitString(SignVector::from_signs(signs))
    }

    pub fn from_i8s(values: &[i8]) -> Option<Self> {
        SignVector::from_i8s(values).map(BitString)
    }

    /// Expands bytes MSB-first; bit 1 becomes `+1` and bit 0 becomes `-1`.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        BitString::from_signs(byte_signs(bytes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit at 0-based index (position `index + 1`).
    pub fn get(&self, index: usize) -> Sign {
        self.0.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = Sign> + '_ {
        self.0.iter()
    }

    pub fn signs(&self) -> &SignVector {
        &self.0
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({:?})", self.0)
    }
}

/// The canonical byte-to-sign expansion used for files and digests.
pub fn byte_signs(bytes: &[u8]) -> impl Iterator<Item = Sign> + '_ {
    bytes
        .iter()
        .flat_map(|&b| (0..8).map(move |t| Sign::from_bit(b & (0x80 >> t) != 0)))
}
