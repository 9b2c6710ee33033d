//! Harnesses that measure the protocol's error behaviour.

pub mod continuum_stats;
pub mod mc;
pub mod oracle;
pub mod orthogonality;
pub mod scenario;

use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::bits::{BitString, SignVector};

pub use continuum_stats::{bandwidth_experiment, continuum_report, false_accept_after_m, negative_product_fraction};
pub use mc::{mc_error_rate, mc_error_rates, RngPolicy, TrialPath, TrialReport};
pub use oracle::{exhaustive_oracle, gf2_baseline, gf2_exhaustive, Gf2Table, OracleReport};
pub use orthogonality::{orthogonality_suite, OrthogonalityReport};
pub use scenario::{scenario_report, ScenarioReport};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("exhaustive enumeration needs 1 <= L <= 3, 1 <= k <= 3 and 2Lk <= 18, got L = {length}, k = {k}")]
    SizeBound { length: usize, k: usize },
    #[error("{0}")]
    InvalidParameter(String),
}

/// Report rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    #[default]
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?}, expected csv or text")),
        }
    }
}

/// Renders trial reports as CSV (with header) or one text line each.
pub fn render_trials(reports: &[TrialReport], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(TrialReport::CSV_HEADER);
            out.push('\n');
            for r in reports {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
        }
        Format::Text => {
            for r in reports {
                out.push_str(&r.to_string());
                out.push('\n');
            }
        }
    }
    out
}

/// Uniform string over `{-1,+1}^length`.
pub(crate) fn random_string<R: Rng>(rng: &mut R, length: usize) -> BitString {
    let words = (0..length.div_ceil(64)).map(|_| rng.gen::<u64>()).collect();
    BitString::from_signs(SignVector::from_minus_words(words, length).iter())
}
