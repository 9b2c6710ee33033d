//! Shared randomness.
//!
//! Both parties hold the same 256-bit master secret and derive every
//! reference noise from it on demand. Derivation is a keyed counter-mode
//! PRF (SipHash-1-3) over a fixed 32-byte little-endian block:
//!
//! ```text
//! [domain: u64][a: u64][b: u64][c: u64]
//! domain 1 (RTW words):      a = position i, b = branch (0 for -1, 1 for +1), c = block
//! domain 2 (Gaussian pairs): a = stream id,  b = pair index,                  c = 0
//! ```
//!
//! An RTW word packs ticks `64 * block + 1 ..= 64 * block + 64`, tick
//! `64 * block + t + 1` in bit `t`, a set bit meaning `-1`. Gaussian
//! samples come in Box-Muller pairs: ticks `2m` and `2m + 1` share the
//! 128-bit output for pair `m`. Transcendental functions go through `libm`
//! so every platform computes the same bit patterns.

use std::fmt;
use std::fs;
use std::hash::Hasher;
use std::io;
use std::path::{Path, PathBuf};

use rand::RngCore;
use sha2::{Digest, Sha256};
use siphasher::sip::SipHasher13;
use siphasher::sip128::{Hasher128, SipHasher13 as SipHasher13x128};
use thiserror::Error;

use crate::bits::{words_for, Sign};

pub const MASTER_LEN: usize = 32;
pub const SEED_ID_LEN: usize = 16;

const DOMAIN_RTW: u64 = 1;
const DOMAIN_GAUSSIAN: u64 = 2;
const KEY_LABEL: &[u8] = b"noise-verify/prf-key/v1";
const ID_LABEL: &[u8] = b"noise-verify/seed-id/v1";
const U64_LABEL: &[u8] = b"noise-verify/seed-from-u64/v1";
const TABLE_LABEL: &[u8] = b"noise-verify/coin-table/v1";

#[derive(Debug, Error)]
pub enum CoinError {
    #[error("cannot read seed file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("seed file {path} holds {len} bytes, expected exactly {MASTER_LEN}")]
    SeedLength { path: PathBuf, len: usize },
    #[error("invalid noise cell: position and tick are 1-based")]
    InvalidCell,
}

/// Public 128-bit identifier of a master seed.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedId(pub [u8; SEED_ID_LEN]);

impl SeedId {
    pub fn as_bytes(&self) -> &[u8; SEED_ID_LEN] {
        &self.0
    }
}

impl fmt::Display for SeedId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for SeedId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeedId({self})")
    }
}

fn labelled_sha256(label: &[u8], data: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(label);
    h.update(data);
    h.finalize().into()
}

/// The common coin: a master secret plus its derived PRF key and public id.
#[derive(Clone)]
pub struct CoinSeed {
    master: [u8; MASTER_LEN],
    key: (u64, u64),
    id: SeedId,
}

impl CoinSeed {
    pub fn from_master(master: [u8; MASTER_LEN]) -> Self {
        let k = labelled_sha256(KEY_LABEL, &master);
        let key = (
            u64::from_le_bytes(k[..8].try_into().unwrap()),
            u64::from_le_bytes(k[8..16].try_into().unwrap()),
        );
        let digest = labelled_sha256(ID_LABEL, &master);
        let id = SeedId(digest[..SEED_ID_LEN].try_into().unwrap());
        CoinSeed { master, key, id }
    }

    /// Deterministic seed for harnesses and examples.
    pub fn from_u64(value: u64) -> Self {
        Self::from_master(labelled_sha256(U64_LABEL, &value.to_le_bytes()))
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut master = [0u8; MASTER_LEN];
        rng.fill_bytes(&mut master);
        Self::from_master(master)
    }

    /// Reads a seed file: exactly 32 raw bytes.
    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, CoinError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| CoinError::Io {
            path: path.to_owned(),
            source,
        })?;
        let master: [u8; MASTER_LEN] =
            bytes
                .as_slice()
                .try_into()
                .map_err(|_| CoinError::SeedLength {
                    path: path.to_owned(),
                    len: bytes.len(),
                })?;
        Ok(Self::from_master(master))
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> io::Result<()> {
        fs::write(path, self.master)
    }

    pub fn master(&self) -> &[u8; MASTER_LEN] {
        &self.master
    }

    pub fn seed_id(&self) -> SeedId {
        self.id
    }

    fn block(&self, domain: u64, a: u64, b: u64, c: u64) -> [u8; 32] {
        let mut buf = [0u8; 32];
        buf[..8].copy_from_slice(&domain.to_le_bytes());
        buf[8..16].copy_from_slice(&a.to_le_bytes());
        buf[16..24].copy_from_slice(&b.to_le_bytes());
        buf[24..].copy_from_slice(&c.to_le_bytes());
        buf
    }

    fn prf64(&self, domain: u64, a: u64, b: u64, c: u64) -> u64 {
        let mut h = SipHasher13::new_with_keys(self.key.0, self.key.1);
        h.write(&self.block(domain, a, b, c));
        h.finish()
    }

    fn prf128(&self, domain: u64, a: u64, b: u64, c: u64) -> (u64, u64) {
        let mut h = SipHasher13x128::new_with_keys(self.key.0, self.key.1);
        h.write(&self.block(domain, a, b, c));
        let out = h.finish128();
        (out.h1, out.h2)
    }

    /// Standard normal pair for ticks `2 * pair` and `2 * pair + 1` of a stream.
    pub fn gaussian_pair(&self, stream_id: u64, pair: u64) -> (f64, f64) {
        let (h0, h1) = self.prf128(DOMAIN_GAUSSIAN, stream_id, pair, 0);
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        // u1 in (0, 1] keeps the log finite.
        let u1 = ((h0 >> 11) + 1) as f64 * SCALE;
        let u2 = (h1 >> 11) as f64 * SCALE;
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * libm::cos(theta), r * libm::sin(theta))
    }
}

impl fmt::Debug for CoinSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoinSeed").field("seed_id", &self.id).finish_non_exhaustive()
    }
}

/// Anything that can answer "what is `R_{i,b}` on this block of ticks".
///
/// [`CoinSeed`] answers lazily through the PRF; [`CoinTable`] holds an
/// explicit finite table, which is what exhaustive enumeration needs.
pub trait CoinSource {
    fn seed_id(&self) -> SeedId;

    /// 64 consecutive components of `R_{position, branch}`, minus-bit packed.
    fn rtw_word(&self, position: u64, branch: Sign, block: u64) -> u64;
}

fn branch_code(branch: Sign) -> u64 {
    match branch {
        Sign::Minus => 0,
        Sign::Plus => 1,
    }
}

impl CoinSource for CoinSeed {
    fn seed_id(&self) -> SeedId {
        self.id
    }

    fn rtw_word(&self, position: u64, branch: Sign, block: u64) -> u64 {
        self.prf64(DOMAIN_RTW, position, branch_code(branch), block)
    }
}

impl<C: CoinSource + ?Sized> CoinSource for &C {
    fn seed_id(&self) -> SeedId {
        (**self).seed_id()
    }

    fn rtw_word(&self, position: u64, branch: Sign, block: u64) -> u64 {
        (**self).rtw_word(position, branch, block)
    }
}

/// Address of one `±1` draw: string position `i`, branch `b`, tick `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseCell {
    position: u64,
    branch: Sign,
    tick: u64,
}

impl NoiseCell {
    pub fn new(position: u64, branch: Sign, tick: u64) -> Result<Self, CoinError> {
        if position == 0 || tick == 0 {
            return Err(CoinError::InvalidCell);
        }
        Ok(NoiseCell {
            position,
            branch,
            tick,
        })
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn branch(&self) -> Sign {
        self.branch
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }
}

/// `R_{i,b}(j)` for one cell.
pub fn derive_rtw_bit<C: CoinSource + ?Sized>(coins: &C, cell: NoiseCell) -> Sign {
    let t = cell.tick - 1;
    let word = coins.rtw_word(cell.position, cell.branch, t / 64);
    if word >> (t % 64) & 1 == 1 {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Tick `tick` of Gaussian stream `stream_id`, both 0-based.
pub fn derive_gaussian_sample(seed: &CoinSeed, stream_id: u64, tick: u64) -> f64 {
    let (even, odd) = seed.gaussian_pair(stream_id, tick / 2);
    if tick.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// Explicit coin table: `2L` sequences of `k` components each.
#[derive(Clone, PartialEq, Eq)]
pub struct CoinTable {
    positions: usize,
    k: usize,
    // index (i - 1) * 2 + branch_code
    rows: Vec<Vec<u64>>,
}

impl CoinTable {
    /// Table number `index` out of `2^(2Lk)`: component `j` of `R_{i,b}`
    /// is `-1` iff bit `((i - 1) * 2 + b) * k + (j - 1)` of `index` is set.
    pub fn from_index(positions: usize, k: usize, index: u64) -> Self {
        assert!(2 * positions * k <= 64, "table does not fit an index");
        let rows = (0..2 * positions)
            .map(|r| {
                let bits = if k == 64 {
                    index
                } else {
                    (index >> (r * k)) & ((1u64 << k) - 1)
                };
                vec![bits]
            })
            .collect();
        CoinTable { positions, k, rows }
    }

    pub fn random<R: RngCore + ?Sized>(positions: usize, k: usize, rng: &mut R) -> Self {
        let n = words_for(k);
        let rows = (0..2 * positions)
            .map(|_| {
                let mut row: Vec<u64> = (0..n).map(|_| rng.next_u64()).collect();
                if !k.is_multiple_of(64) {
                    row[n - 1] &= (1u64 << (k % 64)) - 1;
                }
                row
            })
            .collect();
        CoinTable { positions, k, rows }
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Component `tick` (1-based) of `R_{position, branch}`.
    pub fn get(&self, position: u64, branch: Sign, tick: u64) -> Sign {
        let t = tick - 1;
        let w = self.rtw_word(position, branch, t / 64);
        Sign::from_bit(w >> (t % 64) & 1 == 0)
    }
}

impl CoinSource for CoinTable {
    fn seed_id(&self) -> SeedId {
        let mut h = Sha256::new();
        h.update(TABLE_LABEL);
        h.update((self.positions as u64).to_le_bytes());
        h.update((self.k as u64).to_le_bytes());
        for row in &self.rows {
            for w in row {
                h.update(w.to_le_bytes());
            }
        }
        let d: [u8; 32] = h.finalize().into();
        SeedId(d[..SEED_ID_LEN].try_into().unwrap())
    }

    /// # Panics
    /// If `position` is outside `1..=L` or `block` lies past `k`.
    fn rtw_word(&self, position: u64, branch: Sign, block: u64) -> u64 {
        assert!(
            position >= 1 && position as usize <= self.positions,
            "position {position} outside coin table of length {}",
            self.positions
        );
        let row = (position as usize - 1) * 2 + branch_code(branch) as usize;
        self.rows[row][block as usize]
    }
}
