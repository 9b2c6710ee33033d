//! Equality testing of long strings over slow channels with noise-based
//! logic.
//!
//! Alice and Bob share a common coin ([`coin::CoinSeed`]). Each turns their
//! string into a short fingerprint by multiplying position-and-bit selected
//! random telegraph waves ([`rtw`]); only the fingerprint crosses the
//! channel ([`protocol`]). Equal strings are always accepted; different
//! strings are wrongly accepted with probability `2^-k`, independent of
//! string length.
//!
//! [`continuum`] holds the Gaussian-noise variant of the same idea and
//! [`analysis`] the harnesses that measure error rates, enumerate small
//! instances exhaustively and check the orthogonality relations.

pub mod analysis;
pub mod bits;
pub mod cli;
pub mod coin;
pub mod continuum;
pub mod protocol;
pub mod rtw;

pub use bits::{BitString, Sign, SignVector};
pub use coin::{CoinSeed, CoinSource, CoinTable, NoiseCell, SeedId};
pub use rtw::{compute_k, fingerprint, fingerprint_k, hash_digest, Digest, RtwFingerprint, RtwSequence};
