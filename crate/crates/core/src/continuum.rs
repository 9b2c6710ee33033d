//! Continuum-noise logic on sampled waveforms.
//!
//! Reference noises are white Gaussian streams drawn from the common coin.
//! Stream addressing:
//!
//! * string noise bits: `H_i` is stream `2i`, `L_i` is stream `2i + 1`;
//! * free basis vectors `V_1..V_N` from [`make_basis`]: stream
//!   [`BASIS_STREAM_BASE`]` + (i - 1)`, well away from any string position.
//!
//! Products of many Gaussian factors shrink geometrically in magnitude, so
//! hyperspace vectors of long strings eventually underflow to zero. The
//! comparators are exact, so keep `L` in the tens when working with them.

use std::io::{self, Write};

use thiserror::Error;

use crate::bits::{BitString, Sign};
use crate::coin::CoinSeed;

pub const BASIS_STREAM_BASE: u64 = 1 << 63;

#[derive(Debug, Error, PartialEq)]
pub enum ContinuumError {
    #[error("signal must hold at least one sample")]
    Empty,
    #[error("signal contains a non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("sample rate must be positive and finite, got {0}")]
    SampleRate(f64),
    #[error("signal shapes differ: {left_len} samples at {left_rate} vs {right_len} samples at {right_rate}")]
    ShapeMismatch {
        left_len: usize,
        left_rate: f64,
        right_len: usize,
        right_rate: f64,
    },
    #[error("product of zero signals")]
    NoFactors,
    #[error("string must hold at least one bit")]
    EmptyString,
    #[error("cutoff {cutoff} must lie in (0, {nyquist})")]
    InvalidCutoff { cutoff: f64, nyquist: f64 },
}

/// A finite, nonempty sampled waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumSignal {
    samples: Vec<f64>,
    sample_rate: f64,
    stream_id: Option<u64>,
}

impl ContinuumSignal {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self, ContinuumError> {
        if samples.is_empty() {
            return Err(ContinuumError::Empty);
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(ContinuumError::NonFinite(i));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(ContinuumError::SampleRate(sample_rate));
        }
        Ok(ContinuumSignal {
            samples,
            sample_rate,
            stream_id: None,
        })
    }

    /// `n_samples` ticks of one Gaussian stream at unit sample rate.
    pub fn from_stream(seed: &CoinSeed, stream_id: u64, n_samples: usize) -> Self {
        let mut samples = Vec::with_capacity(n_samples + 1);
        for pair in 0..n_samples.div_ceil(2) as u64 {
            let (a, b) = seed.gaussian_pair(stream_id, pair);
            samples.push(a);
            samples.push(b);
        }
        samples.truncate(n_samples);
        ContinuumSignal {
            samples,
            sample_rate: 1.0,
            stream_id: Some(stream_id),
        }
    }

    pub fn constant(value: f64, n_samples: usize, sample_rate: f64) -> Result<Self, ContinuumError> {
        Self::new(vec![value; n_samples], sample_rate)
    }

    pub fn with_sample_rate(mut self, sample_rate: f64) -> Result<Self, ContinuumError> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(ContinuumError::SampleRate(sample_rate));
        }
        self.sample_rate = sample_rate;
        Ok(self)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Source stream for signals drawn directly from the coin.
    pub fn stream_id(&self) -> Option<u64> {
        self.stream_id
    }

    pub fn negated(&self) -> ContinuumSignal {
        ContinuumSignal {
            samples: self.samples.iter().map(|x| -x).collect(),
            sample_rate: self.sample_rate,
            stream_id: None,
        }
    }

    /// Time average `<a(t) b(t)>`.
    pub fn mean_product(&self, other: &ContinuumSignal) -> Result<f64, ContinuumError> {
        check_shape(self, other)?;
        let sum: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .sum();
        Ok(sum / self.len() as f64)
    }

    /// Writes `tick,value` CSV, one sample per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "tick,value")?;
        for (t, v) in self.samples.iter().enumerate() {
            writeln!(out, "{t},{v}")?;
        }
        Ok(())
    }
}

fn check_shape(a: &ContinuumSignal, b: &ContinuumSignal) -> Result<(), ContinuumError> {
    if a.len() != b.len() || a.sample_rate != b.sample_rate {
        return Err(ContinuumError::ShapeMismatch {
            left_len: a.len(),
            left_rate: a.sample_rate,
            right_len: b.len(),
            right_rate: b.sample_rate,
        });
    }
    Ok(())
}

/// The two reference noises of one string position.
#[derive(Debug, Clone)]
pub struct NoiseBitPair {
    pub position: u64,
    pub high: ContinuumSignal,
    pub low: ContinuumSignal,
}

impl NoiseBitPair {
    pub fn derive(seed: &CoinSeed, position: u64, n_samples: usize) -> Self {
        assert!(position >= 1, "string positions are 1-based");
        NoiseBitPair {
            position,
            high: ContinuumSignal::from_stream(seed, high_stream(position), n_samples),
            low: ContinuumSignal::from_stream(seed, low_stream(position), n_samples),
        }
    }

    pub fn select(&self, bit: Sign) -> &ContinuumSignal {
        match bit {
            Sign::Plus => &self.high,
            Sign::Minus => &self.low,
        }
    }
}

pub fn high_stream(position: u64) -> u64 {
    2 * position
}

pub fn low_stream(position: u64) -> u64 {
    2 * position + 1
}

/// `V_1..V_count`, independent zero-mean unit-variance white noises.
pub fn make_basis(seed: &CoinSeed, count: usize, n_samples: usize) -> Vec<ContinuumSignal> {
    (0..count as u64)
        .map(|i| ContinuumSignal::from_stream(seed, BASIS_STREAM_BASE + i, n_samples))
        .collect()
}

/// Sample-wise product, accumulated left to right.
pub fn signal_product(signals: &[&ContinuumSignal]) -> Result<ContinuumSignal, ContinuumError> {
    let (first, rest) = signals.split_first().ok_or(ContinuumError::NoFactors)?;
    let mut samples = first.samples.clone();
    for s in rest {
        check_shape(first, s)?;
        for (acc, x) in samples.iter_mut().zip(&s.samples) {
            *acc *= x;
        }
    }
    Ok(ContinuumSignal {
        samples,
        sample_rate: first.sample_rate,
        stream_id: if rest.is_empty() { first.stream_id } else { None },
    })
}

/// `W(t) = prod_i S_i(t)` with `S_i = H_i` for `+1` bits and `L_i` for `-1`.
pub fn string_hyperspace_vector(
    s: &BitString,
    seed: &CoinSeed,
    n_samples: usize,
) -> Result<ContinuumSignal, ContinuumError> {
    if s.is_empty() {
        return Err(ContinuumError::EmptyString);
    }
    if n_samples == 0 {
        return Err(ContinuumError::Empty);
    }
    let mut samples = vec![1.0f64; n_samples];
    for (idx, bit) in s.iter().enumerate() {
        let position = idx as u64 + 1;
        let stream = match bit {
            Sign::Plus => high_stream(position),
            Sign::Minus => low_stream(position),
        };
        for pair in 0..n_samples.div_ceil(2) {
            let (a, b) = seed.gaussian_pair(stream, pair as u64);
            samples[2 * pair] *= a;
            if let Some(x) = samples.get_mut(2 * pair + 1) {
                *x *= b;
            }
        }
    }
    // A single factor is exactly that noise bit's stream.
    let stream_id = (s.len() == 1).then(|| match s.get(0) {
        Sign::Plus => high_stream(1),
        Sign::Minus => low_stream(1),
    });
    Ok(ContinuumSignal {
        samples,
        sample_rate: 1.0,
        stream_id,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Consistent,
    /// First sample index at which the equality assumption fails.
    Violated(usize),
}

impl Comparison {
    pub fn is_consistent(self) -> bool {
        self == Comparison::Consistent
    }
}

/// Flags the first sample where `wA - wB` is not exactly zero.
pub fn compare_difference(
    a: &ContinuumSignal,
    b: &ContinuumSignal,
) -> Result<Comparison, ContinuumError> {
    check_shape(a, b)?;
    Ok(a.samples
        .iter()
        .zip(&b.samples)
        .position(|(x, y)| x - y != 0.0)
        .map_or(Comparison::Consistent, Comparison::Violated))
}

/// Flags the first sample where `wA * wB` is negative.
pub fn compare_product(
    a: &ContinuumSignal,
    b: &ContinuumSignal,
) -> Result<Comparison, ContinuumError> {
    check_shape(a, b)?;
    Ok(a.samples
        .iter()
        .zip(&b.samples)
        .position(|(x, y)| x * y < 0.0)
        .map_or(Comparison::Consistent, Comparison::Violated))
}

/// Single-pole recursive low-pass filter starting from rest:
///
/// ```text
/// alpha = 1 - exp(-2 pi cutoff / sample_rate)
/// y[n]  = y[n-1] + alpha * (x[n] - y[n-1]),   y[-1] = 0
/// ```
///
/// White noise passed through it has autocorrelation `exp(-|lag| / tau)`
/// with `tau = 1 / (2 pi cutoff)`.
pub fn lowpass(sig: &ContinuumSignal, cutoff: f64) -> Result<ContinuumSignal, ContinuumError> {
    let nyquist = sig.sample_rate / 2.0;
    if !(cutoff > 0.0 && cutoff < nyquist) {
        return Err(ContinuumError::InvalidCutoff { cutoff, nyquist });
    }
    let alpha = 1.0 - libm::exp(-2.0 * std::f64::consts::PI * cutoff / sig.sample_rate);
    let mut y = 0.0f64;
    let samples = sig
        .samples
        .iter()
        .map(|&x| {
            y += alpha * (x - y);
            y
        })
        .collect();
    Ok(ContinuumSignal {
        samples,
        sample_rate: sig.sample_rate,
        stream_id: None,
    })
}

/// Normalized autocorrelation at integer lag, mean removed.
pub fn autocorrelation(sig: &ContinuumSignal, lag: usize) -> f64 {
    let n = sig.len();
    assert!(lag < n);
    let mean = sig.samples.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = sig.samples.iter().map(|x| x - mean).collect();
    let var = centered.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let cov = centered[..n - lag]
        .iter()
        .zip(&centered[lag..])
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / (n - lag) as f64;
    cov / var
}

/// Time at which the normalized autocorrelation first drops to `1/e`,
/// interpolated linearly between lags. `None` if it never does within
/// half the record, or the signal is constant.
pub fn correlation_time(sig: &ContinuumSignal) -> Option<f64> {
    let n = sig.len();
    let mean = sig.samples.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = sig.samples.iter().map(|x| x - mean).collect();
    let var = centered.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if var == 0.0 {
        return None;
    }
    let threshold = (-1.0f64).exp();
    let mut prev = 1.0;
    for lag in 1..n / 2 {
        let cov = centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / (n - lag) as f64;
        let rho = cov / var;
        if rho <= threshold {
            let frac = (prev - threshold) / (prev - rho);
            return Some((lag as f64 - 1.0 + frac) / sig.sample_rate);
        }
        prev = rho;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_signals() {
        assert_eq!(ContinuumSignal::new(vec![], 1.0), Err(ContinuumError::Empty));
        assert_eq!(
            ContinuumSignal::new(vec![1.0, f64::NAN], 1.0),
            Err(ContinuumError::NonFinite(1))
        );
        assert!(ContinuumSignal::new(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn basis_is_deterministic() {
        let seed = CoinSeed::from_u64(5);
        let a = make_basis(&seed, 3, 101);
        let b = make_basis(&seed, 3, 101);
        assert_eq!(a, b);
        assert_eq!(a[0].len(), 101);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn product_with_ones_is_identity() {
        let seed = CoinSeed::from_u64(5);
        let v = &make_basis(&seed, 1, 50)[0];
        let ones = ContinuumSignal::constant(1.0, 50, 1.0).unwrap();
        assert_eq!(signal_product(&[v, &ones]).unwrap().samples(), v.samples());
        let short = ContinuumSignal::constant(1.0, 49, 1.0).unwrap();
        assert!(matches!(
            signal_product(&[v, &short]),
            Err(ContinuumError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn single_bit_vector_is_high_noise() {
        let seed = CoinSeed::from_u64(8);
        let w = string_hyperspace_vector(&BitString::from_i8s(&[1]).unwrap(), &seed, 33).unwrap();
        let pair = NoiseBitPair::derive(&seed, 1, 33);
        assert_eq!(w.samples(), pair.high.samples());
        assert_eq!(w.stream_id(), Some(2));
        assert_eq!(pair.low.stream_id(), Some(3));
        assert!(string_hyperspace_vector(&BitString::from_signs([]), &seed, 3).is_err());
    }

    #[test]
    fn comparators_on_edges() {
        let seed = CoinSeed::from_u64(8);
        let w = string_hyperspace_vector(&BitString::from_bytes(b"x"), &seed, 64).unwrap();
        assert_eq!(compare_difference(&w, &w.clone()), Ok(Comparison::Consistent));
        assert_eq!(compare_product(&w, &w.clone()), Ok(Comparison::Consistent));
        let neg = w.negated();
        assert_eq!(compare_difference(&w, &neg), Ok(Comparison::Violated(0)));
        assert_eq!(compare_product(&w, &neg), Ok(Comparison::Violated(0)));
    }

    #[test]
    fn lowpass_zero_and_cutoff_checks() {
        let zero = ContinuumSignal::constant(0.0, 100, 10.0).unwrap();
        assert!(lowpass(&zero, 1.0).unwrap().samples().iter().all(|&x| x == 0.0));
        assert!(lowpass(&zero, 5.0).is_err());
        assert!(lowpass(&zero, 0.0).is_err());
    }

    #[test]
    fn csv_export() {
        let s = ContinuumSignal::new(vec![0.5, -1.0], 1.0).unwrap();
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "tick,value\n0,0.5\n1,-1\n");
    }
}
