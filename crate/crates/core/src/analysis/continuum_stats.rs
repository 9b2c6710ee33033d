//! Empirical behaviour of the continuum comparators and filters.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::mc::binomial_sigma;
use crate::analysis::{random_string, AnalysisError};
use crate::bits::{BitString, Sign};
use crate::coin::CoinSeed;
use crate::continuum::{
    compare_difference, compare_product, correlation_time, lowpass, make_basis, signal_product,
    string_hyperspace_vector, Comparison, ContinuumSignal,
};

/// Fraction of samples with `wA(t) wB(t) < 0`.
pub fn negative_product_fraction(a: &ContinuumSignal, b: &ContinuumSignal) -> f64 {
    assert_eq!(a.len(), b.len());
    let neg = a
        .samples()
        .iter()
        .zip(b.samples())
        .filter(|(x, y)| *x * *y < 0.0)
        .count();
    neg as f64 / a.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixAcceptRate {
    pub m: usize,
    pub trials: u64,
    pub accepts: u64,
    pub rate: f64,
    pub expected: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// For fresh seeds and random unequal strings of length `length`, the
/// fraction of trials in which the product comparator finds no negative
/// sample among the first `m` samples, for each `m` in `1..=max_m`.
pub fn false_accept_after_m(
    length: usize,
    max_m: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<PrefixAcceptRate>, AnalysisError> {
    if length == 0 || max_m == 0 || trials == 0 {
        return Err(AnalysisError::InvalidParameter(
            "length, m and trials must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepts = vec![0u64; max_m];
    for _ in 0..trials {
        let coins = CoinSeed::random(&mut rng);
        let (s, t) = loop {
            let s = random_string(&mut rng, length);
            let t = random_string(&mut rng, length);
            if s != t {
                break (s, t);
            }
        };
        let wa = string_hyperspace_vector(&s, &coins, max_m).map_err(continuum_err)?;
        let wb = string_hyperspace_vector(&t, &coins, max_m).map_err(continuum_err)?;
        let first_violation = match compare_product(&wa, &wb).map_err(continuum_err)? {
            Comparison::Consistent => max_m,
            Comparison::Violated(i) => i,
        };
        // Accepted after m samples iff no violation among indices < m.
        for count in accepts.iter_mut().take(first_violation) {
            *count += 1;
        }
    }
    Ok(accepts
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            let m = i + 1;
            let expected = libm::ldexp(1.0, -(m as i32));
            let rate = a as f64 / trials as f64;
            let sigma = binomial_sigma(expected, trials);
            PrefixAcceptRate {
                m,
                trials,
                accepts: a,
                rate,
                expected,
                sigma,
                pass: (rate - expected).abs() <= 3.0 * sigma,
            }
        })
        .collect())
}

fn continuum_err(e: crate::continuum::ContinuumError) -> AnalysisError {
    AnalysisError::InvalidParameter(e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthReport {
    pub factors: usize,
    pub cutoff: f64,
    pub sample_rate: f64,
    /// `1 / (2 pi cutoff)`.
    pub theoretical_single: f64,
    pub single: f64,
    pub product: f64,
}

impl BandwidthReport {
    /// `product / single`; ideally `1 / factors`.
    pub fn ratio(&self) -> f64 {
        self.product / self.single
    }
}

impl fmt::Display for BandwidthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "correlation time: single filtered noise {:.5} s (theory {:.5} s), product of {} {:.5} s, ratio {:.3} (ideal {:.3})",
            self.single,
            self.theoretical_single,
            self.factors,
            self.product,
            self.ratio(),
            1.0 / self.factors as f64
        )
    }
}

/// Filters `factors` independent white noises identically and compares the
/// correlation time of one of them with that of their product.
pub fn bandwidth_experiment(
    seed: &CoinSeed,
    factors: usize,
    n_samples: usize,
    sample_rate: f64,
    cutoff: f64,
) -> Result<BandwidthReport, AnalysisError> {
    if factors == 0 {
        return Err(AnalysisError::InvalidParameter("need at least one factor".into()));
    }
    let filtered = make_basis(seed, factors, n_samples)
        .into_iter()
        .map(|v| {
            let v = v.with_sample_rate(sample_rate).map_err(continuum_err)?;
            lowpass(&v, cutoff).map_err(continuum_err)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&ContinuumSignal> = filtered.iter().collect();
    let product = signal_product(&refs).map_err(continuum_err)?;
    let single = correlation_time(&filtered[0])
        .ok_or_else(|| AnalysisError::InvalidParameter("record too short for correlation time".into()))?;
    let product_time = correlation_time(&product)
        .ok_or_else(|| AnalysisError::InvalidParameter("record too short for correlation time".into()))?;
    Ok(BandwidthReport {
        factors,
        cutoff,
        sample_rate,
        theoretical_single: 1.0 / (2.0 * std::f64::consts::PI * cutoff),
        single,
        product: product_time,
    })
}

/// Summary printed by the `continuum` subcommand.
#[derive(Debug, Clone)]
pub struct ContinuumReport {
    pub length: usize,
    pub samples: usize,
    pub equal_difference: Comparison,
    pub equal_product: Comparison,
    pub unequal_difference: Comparison,
    pub unequal_product: Comparison,
    pub negative_fraction: f64,
    /// First negative product sample after both parties low-pass the
    /// unequal vectors at a tenth of the sample rate.
    pub filtered_detection: Comparison,
}

impl fmt::Display for ContinuumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |c: &Comparison| match c {
            Comparison::Consistent => "consistent".to_string(),
            Comparison::Violated(i) => format!("violated at sample {i}"),
        };
        writeln!(f, "continuum string verification, L = {}, {} samples", self.length, self.samples)?;
        writeln!(f, "equal strings   : difference {}, product {}", show(&self.equal_difference), show(&self.equal_product))?;
        writeln!(f, "unequal strings : difference {}, product {}", show(&self.unequal_difference), show(&self.unequal_product))?;
        writeln!(f, "negative product fraction (unequal): {:.4} (ideal 0.5)", self.negative_fraction)?;
        write!(f, "filtered detection (unequal)        : {}", show(&self.filtered_detection))
    }
}

/// Builds a random string of length `length`, a copy of it, and a variant
/// with its last bit flipped, and runs both comparators on each pair.
pub fn continuum_report(seed: &CoinSeed, length: usize, samples: usize, rng_seed: u64) -> Result<ContinuumReport, AnalysisError> {
    if length == 0 || samples < 2 {
        return Err(AnalysisError::InvalidParameter(
            "need L >= 1 and at least 2 samples".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let s = random_string(&mut rng, length);
    let mut flipped: Vec<Sign> = s.iter().collect();
    let last = flipped.len() - 1;
    flipped[last] = -flipped[last];
    let t = BitString::from_signs(flipped);

    let wa = string_hyperspace_vector(&s, seed, samples).map_err(continuum_err)?;
    let wa2 = string_hyperspace_vector(&s.clone(), seed, samples).map_err(continuum_err)?;
    let wb = string_hyperspace_vector(&t, seed, samples).map_err(continuum_err)?;
    let cutoff = 0.1 * wa.sample_rate();
    let fa = lowpass(&wa, cutoff).map_err(continuum_err)?;
    let fb = lowpass(&wb, cutoff).map_err(continuum_err)?;
    Ok(ContinuumReport {
        length,
        samples,
        equal_difference: compare_difference(&wa, &wa2).map_err(continuum_err)?,
        equal_product: compare_product(&wa, &wa2).map_err(continuum_err)?,
        unequal_difference: compare_difference(&wa, &wb).map_err(continuum_err)?,
        unequal_product: compare_product(&wa, &wb).map_err(continuum_err)?,
        negative_fraction: negative_product_fraction(&wa, &wb),
        filtered_detection: compare_product(&fa, &fb).map_err(continuum_err)?,
    })
}
