//! Transfer-time comparison: fingerprint versus sending the whole string.

use std::fmt;

use crate::analysis::AnalysisError;
use crate::rtw::compute_k;

pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// `k` nearest to `log2(1/epsilon)`, i.e. the size for which `0.5^k` is
/// closest to `epsilon` on a log scale. Unlike [`compute_k`] this does not
/// guarantee `2^-k < epsilon`.
pub fn nominal_k(epsilon: f64) -> Result<usize, AnalysisError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(((-epsilon.log2()).round() as usize).max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub length: u64,
    /// Bits per second.
    pub channel_rate: f64,
    pub epsilon: f64,
    /// Strict sizing: smallest `k` with `k > log2(1/epsilon)`.
    pub k: usize,
    pub protocol_time: f64,
    /// `round(log2(1/epsilon))`, the size for which `0.5^k ~ epsilon`.
    pub nominal_k: usize,
    pub nominal_protocol_time: f64,
    pub naive_time: f64,
}

impl ScenarioReport {
    pub fn naive_years(&self) -> f64 {
        self.naive_time / SECONDS_PER_YEAR
    }

    /// `0.5^nominal_k`, the error actually reached with the nominal size.
    pub fn nominal_error(&self) -> f64 {
        libm::ldexp(1.0, -(self.nominal_k as i32))
    }

    pub fn strict_error(&self) -> f64 {
        libm::ldexp(1.0, -(self.k as i32))
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "string length L      : {} bits", self.length)?;
        writeln!(f, "channel rate         : {} bit/s", self.channel_rate)?;
        writeln!(f, "error bound epsilon  : {:e}", self.epsilon)?;
        writeln!(
            f,
            "strict k             : {:>3} bits, 0.5^k = {:.3e}, protocol time {} s (k > log2(1/eps))",
            self.k,
            self.strict_error(),
            self.protocol_time
        )?;
        writeln!(
            f,
            "nominal k            : {:>3} bits, 0.5^k = {:.3e}, protocol time {} s (0.5^k ~ eps)",
            self.nominal_k,
            self.nominal_error(),
            self.nominal_protocol_time
        )?;
        write!(
            f,
            "naive transfer       : {} s = {:.1} years",
            self.naive_time,
            self.naive_years()
        )
    }
}

pub fn scenario_report(length: u64, channel_rate: f64, epsilon: f64) -> Result<ScenarioReport, AnalysisError> {
    if length == 0 || !(channel_rate > 0.0 && channel_rate.is_finite()) {
        return Err(AnalysisError::InvalidParameter(
            "length and channel rate must be positive".into(),
        ));
    }
    let k = compute_k(epsilon).map_err(|e| AnalysisError::InvalidParameter(e.to_string()))?;
    let nominal_k = nominal_k(epsilon)?;
    Ok(ScenarioReport {
        length,
        channel_rate,
        epsilon,
        k,
        protocol_time: k as f64 / channel_rate,
        nominal_k,
        nominal_protocol_time: nominal_k as f64 / channel_rate,
        naive_time: length as f64 / channel_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn break_even_when_length_is_k() {
        let r = scenario_report(7, 10.0, 0.01).unwrap();
        assert_eq!(r.k, 7);
        assert_eq!(r.protocol_time, r.naive_time);
    }

    #[test]
    fn doubling_rate_halves_times() {
        let a = scenario_report(1 << 20, 100.0, 1e-6).unwrap();
        let b = scenario_report(1 << 20, 200.0, 1e-6).unwrap();
        assert_eq!(a.protocol_time, 2.0 * b.protocol_time);
        assert_eq!(a.naive_time, 2.0 * b.naive_time);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(scenario_report(0, 1.0, 0.1).is_err());
        assert!(scenario_report(1, 0.0, 0.1).is_err());
        assert!(scenario_report(1, 1.0, 1.5).is_err());
    }
}
