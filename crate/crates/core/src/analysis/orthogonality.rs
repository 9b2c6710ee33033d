//! Empirical Kronecker-delta checks for the continuum and RTW bases and
//! their hyperspace products.

use std::fmt;

use crate::analysis::AnalysisError;
use crate::bits::Sign;
use crate::coin::CoinSeed;
use crate::continuum::{make_basis, signal_product, ContinuumSignal};
use crate::rtw::{rtw_hyperspace_product, RtwSequence};

pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub group: &'static str,
    pub relation: String,
    pub target: f64,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub n: usize,
    pub estimates: Vec<Estimate>,
}

impl OrthogonalityReport {
    pub fn pass(&self) -> bool {
        self.estimates.iter().all(|e| e.pass)
    }
}

impl fmt::Display for OrthogonalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "orthogonality suite, n = {}, tolerance 4/sqrt(n) = {:.4}", self.n, 4.0 / (self.n as f64).sqrt())?;
        for e in &self.estimates {
            writeln!(
                f,
                "  {:<18} {:<22} target {:>2} estimate {:+.6} {}",
                e.group,
                e.relation,
                e.target,
                e.value,
                if e.pass { "PASS" } else { "FAIL" }
            )?;
        }
        write!(f, "overall: {}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

struct Collector {
    tolerance: f64,
    estimates: Vec<Estimate>,
}

impl Collector {
    fn push(&mut self, group: &'static str, relation: impl Into<String>, target: f64, value: f64) {
        self.estimates.push(Estimate {
            group,
            relation: relation.into(),
            target,
            value,
            tolerance: self.tolerance,
            pass: (value - target).abs() <= self.tolerance,
        });
    }

    /// Estimates that hold exactly, with no statistical slack.
    fn push_exact(&mut self, group: &'static str, relation: impl Into<String>, target: f64, value: f64) {
        self.estimates.push(Estimate {
            group,
            relation: relation.into(),
            target,
            value,
            tolerance: 0.0,
            pass: value == target,
        });
    }
}

fn avg(a: &ContinuumSignal, b: &ContinuumSignal) -> f64 {
    a.mean_product(b).expect("basis signals share a shape")
}

/// Time-averages for the continuum basis `V_1..V_6`, their products
/// `H_{i,k} = V_i V_k`, `L_{1,2,3,4} = H_{1,2} H_{3,4}` and
/// `L_{1,2,3} = H_{1,2} V_3`, and for RTWs `R_1..R_6` and the 5-fold
/// product `W = R_1 ... R_5`. Every estimate must lie within `4/sqrt(n)`
/// of its target.
pub fn orthogonality_suite(seed: &CoinSeed, n: usize) -> Result<OrthogonalityReport, AnalysisError> {
    if n < MIN_SAMPLES {
        return Err(AnalysisError::InvalidParameter(format!(
            "orthogonality suite needs n >= {MIN_SAMPLES}, got {n}"
        )));
    }
    let mut c = Collector {
        tolerance: 4.0 / (n as f64).sqrt(),
        estimates: Vec::new(),
    };

    let v = make_basis(seed, 6, n);
    let prod = |xs: &[&ContinuumSignal]| signal_product(xs).expect("basis signals share a shape");
    c.push("basis", "<V1 V1>", 1.0, avg(&v[0], &v[0]));
    c.push("basis", "<V2 V2>", 1.0, avg(&v[1], &v[1]));
    c.push("basis", "<V1 V2>", 0.0, avg(&v[0], &v[1]));
    c.push("basis", "<V2 V3>", 0.0, avg(&v[1], &v[2]));

    let h12 = prod(&[&v[0], &v[1]]);
    for (i, vn) in v.iter().enumerate().take(3) {
        c.push("pair product", format!("<H12 V{}>", i + 1), 0.0, avg(&h12, vn));
    }

    let h34 = prod(&[&v[2], &v[3]]);
    let h56 = prod(&[&v[4], &v[5]]);
    let l1234 = prod(&[&h12, &h34]);
    c.push("four-fold product", "<L1234 V1>", 0.0, avg(&l1234, &v[0]));
    c.push("four-fold product", "<L1234 V5>", 0.0, avg(&l1234, &v[4]));
    c.push("four-fold product", "<L1234 H56>", 0.0, avg(&l1234, &h56));

    let l123 = prod(&[&h12, &v[2]]);
    let h45 = prod(&[&v[3], &v[4]]);
    c.push("three-fold product", "<L123 V1>", 0.0, avg(&l123, &v[0]));
    c.push("three-fold product", "<L123 V4>", 0.0, avg(&l123, &v[3]));
    c.push("three-fold product", "<L123 H45>", 0.0, avg(&l123, &h45));

    let r: Vec<RtwSequence> = (1..=6)
        .map(|i| RtwSequence::derive(seed, i, Sign::Plus, n + 1))
        .collect();
    let head = |s: &RtwSequence| s.values().prefix(n);
    let shifted = |s: &RtwSequence| {
        crate::bits::SignVector::from_signs(s.values().iter().skip(1))
    };
    c.push_exact("rtw basis", "<R1(j) R1(j)>", 1.0, head(&r[0]).mean_product(&head(&r[0])));
    c.push("rtw basis", "<R1(j) R2(j)>", 0.0, head(&r[0]).mean_product(&head(&r[1])));
    c.push("rtw basis", "<R1(j) R1(j+1)>", 0.0, head(&r[0]).mean_product(&shifted(&r[0])));
    c.push("rtw basis", "<R2(j) R3(j+1)>", 0.0, head(&r[1]).mean_product(&shifted(&r[2])));

    let w = rtw_hyperspace_product(&r[..5]).expect("equal lengths");
    let ones = crate::bits::SignVector::ones(n);
    c.push("rtw product", "<W>", 0.0, head(&w).mean_product(&ones));
    c.push_exact("rtw product", "<W W>", 1.0, head(&w).mean_product(&head(&w)));
    c.push("rtw product", "<W R1>", 0.0, head(&w).mean_product(&head(&r[0])));
    c.push("rtw product", "<W R3>", 0.0, head(&w).mean_product(&head(&r[2])));
    c.push("rtw product", "<W R6>", 0.0, head(&w).mean_product(&head(&r[5])));

    Ok(OrthogonalityReport {
        n,
        estimates: c.estimates,
    })
}
