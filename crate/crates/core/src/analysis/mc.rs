//! Monte Carlo false-accept rates.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{random_string, AnalysisError};
use crate::bits::BitString;
use crate::coin::CoinSeed;
use crate::protocol::{loopback_session, Decision};
use crate::rtw::{check_equal_relations, fingerprint_k, EqualRelations};

/// `sqrt(p (1 - p) / n)`.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// An epsilon for which the strict sizing rule yields exactly `k`.
pub fn epsilon_for_k(k: usize) -> f64 {
    1.5 * libm::ldexp(1.0, -(k as i32))
}

/// How each trial reaches its verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialPath {
    /// Both fingerprints computed locally and compared with the verdict rule.
    Fingerprint,
    /// A full encoded loopback session per trial.
    Loopback,
}

/// Trial randomness: a ChaCha8 stream seeded from `seed` supplies every
/// trial's master seed and input strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngPolicy {
    pub seed: u64,
    pub path: TrialPath,
}

impl RngPolicy {
    pub fn fingerprint(seed: u64) -> Self {
        RngPolicy {
            seed,
            path: TrialPath::Fingerprint,
        }
    }

    pub fn loopback(seed: u64) -> Self {
        RngPolicy {
            seed,
            path: TrialPath::Loopback,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub k: usize,
    pub length: usize,
    pub trials: u64,
    /// Trials that ended in `equal_presumed`.
    pub false_accepts: u64,
    pub rate: f64,
    pub expected: f64,
    pub sigma: f64,
    pub pass: bool,
    pub unequal: bool,
}

impl TrialReport {
    pub fn from_counts(k: usize, length: usize, trials: u64, accepts: u64, unequal: bool) -> Self {
        let rate = accepts as f64 / trials as f64;
        if unequal {
            let expected = libm::ldexp(1.0, -(k as i32));
            let sigma = binomial_sigma(expected, trials);
            TrialReport {
                k,
                length,
                trials,
                false_accepts: accepts,
                rate,
                expected,
                sigma,
                pass: (rate - expected).abs() <= 3.0 * sigma,
                unequal,
            }
        } else {
            // Equal inputs must always be accepted.
            TrialReport {
                k,
                length,
                trials,
                false_accepts: accepts,
                rate,
                expected: 1.0,
                sigma: 0.0,
                pass: accepts == trials,
                unequal,
            }
        }
    }

    /// Trials whose verdict contradicts the truth.
    pub fn misclassified(&self) -> u64 {
        if self.unequal {
            self.false_accepts
        } else {
            self.trials - self.false_accepts
        }
    }

    pub const CSV_HEADER: &'static str = "k,L,trials,false_accepts,rate,expected,sigma,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{:e},{}",
            self.k, self.length, self.trials, self.false_accepts, self.rate, self.expected, self.sigma, self.pass
        )
    }
}

impl fmt::Display for TrialReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={:<3} L={:<6} trials={} accepts={} rate={:.6e} expected={:.6e} 3sigma={:.2e} {}",
            self.k,
            self.length,
            self.trials,
            self.false_accepts,
            self.rate,
            self.expected,
            3.0 * self.sigma,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn draw_pair<R: Rng>(rng: &mut R, length: usize, unequal: bool) -> (BitString, BitString) {
    let s = random_string(rng, length);
    if !unequal {
        return (s.clone(), s);
    }
    loop {
        let t = random_string(rng, length);
        if t != s {
            return (s, t);
        }
    }
}

fn validate(ks: &[usize], length: usize, trials: u64, unequal: bool) -> Result<(), AnalysisError> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(AnalysisError::InvalidParameter("k must be at least 1".into()));
    }
    if trials == 0 {
        return Err(AnalysisError::InvalidParameter("trials must be at least 1".into()));
    }
    if unequal && length == 0 {
        return Err(AnalysisError::InvalidParameter(
            "unequal strings need length at least 1".into(),
        ));
    }
    Ok(())
}

/// Runs `trials` independent trials with fresh seeds. With `unequal`, the
/// strings are drawn uniformly from `{-1,+1}^L` conditioned on differing.
pub fn mc_error_rate(
    k: usize,
    length: usize,
    trials: u64,
    unequal: bool,
    policy: RngPolicy,
) -> Result<TrialReport, AnalysisError> {
    validate(&[k], length, trials, unequal)?;
    match policy.path {
        TrialPath::Fingerprint => Ok(mc_error_rates(&[k], length, trials, unequal, policy.seed)?.remove(0)),
        TrialPath::Loopback => {
            let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
            let epsilon = epsilon_for_k(k);
            let mut accepts = 0u64;
            for _ in 0..trials {
                let seed = CoinSeed::random(&mut rng);
                let (s, t) = draw_pair(&mut rng, length, unequal);
                let out = loopback_session(&seed, s, t, epsilon)
                    .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))?;
                let v = out
                    .responder
                    .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))?;
                debug_assert_eq!(v.k, k);
                if v.decision == Decision::EqualPresumed {
                    accepts += 1;
                }
            }
            Ok(TrialReport::from_counts(k, length, trials, accepts, unequal))
        }
    }
}

/// One batch of trials scored at several `k` at once. Each trial computes
/// fingerprints with `max(ks)` components; component `j` does not depend
/// on `k`, so the first `k` components are exactly the `k`-fingerprint.
pub fn mc_error_rates(
    ks: &[usize],
    length: usize,
    trials: u64,
    unequal: bool,
    seed: u64,
) -> Result<Vec<TrialReport>, AnalysisError> {
    validate(ks, length, trials, unequal)?;
    let k_max = *ks.iter().max().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepts = vec![0u64; ks.len()];
    for _ in 0..trials {
        let coins = CoinSeed::random(&mut rng);
        let (s, t) = draw_pair(&mut rng, length, unequal);
        let a = fingerprint_k(&s, &coins, k_max);
        let b = fingerprint_k(&t, &coins, k_max);
        for (count, &k) in accepts.iter_mut().zip(ks) {
            if check_equal_relations(&a.prefix(k), &b.prefix(k)) == Ok(EqualRelations::Holds) {
                *count += 1;
            }
        }
    }
    Ok(ks
        .iter()
        .zip(accepts)
        .map(|(&k, a)| TrialReport::from_counts(k, length, trials, a, unequal))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rtw::compute_k;

    #[test]
    fn epsilon_for_k_round_trips() {
        for k in 1..=60 {
            assert_eq!(compute_k(epsilon_for_k(k)), Ok(k));
        }
    }

    #[test]
    fn equal_inputs_never_misclassified() {
        for path in [TrialPath::Fingerprint, TrialPath::Loopback] {
            let r = mc_error_rate(3, 12, 2000, false, RngPolicy { seed: 4, path }).unwrap();
            assert_eq!(r.false_accepts, r.trials);
            assert_eq!(r.misclassified(), 0);
            assert!(r.pass);
        }
    }

    #[test]
    fn sigma_arithmetic() {
        // 3 sigma at p = 1/16, n = 1e6.
        let s = binomial_sigma(0.0625, 1_000_000);
        assert!((3.0 * s - 7.26e-4).abs() < 1e-6);
    }

    #[test]
    fn rejects_degenerate_arguments() {
        assert!(mc_error_rate(0, 4, 10, true, RngPolicy::fingerprint(0)).is_err());
        assert!(mc_error_rate(1, 0, 10, true, RngPolicy::fingerprint(0)).is_err());
        assert!(mc_error_rate(1, 4, 0, true, RngPolicy::fingerprint(0)).is_err());
    }

    #[test]
    fn loopback_and_fingerprint_paths_agree_in_law() {
        let a = mc_error_rate(2, 8, 20_000, true, RngPolicy::loopback(1)).unwrap();
        let b = mc_error_rate(2, 8, 20_000, true, RngPolicy::fingerprint(2)).unwrap();
        assert!(a.pass, "{a}");
        assert!(b.pass, "{b}");
    }
}
