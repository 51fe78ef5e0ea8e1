//! Per-dimension singularity reports.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::conditions::{
    beta_enclosure, check_cond1, check_cond2, closed_form_check, closed_form_lambda,
    lambda_prime_enclosure,
};
use super::sign::{CertStatus, Certificate};
use super::{CertifierError, Threshold};
use crate::interval::{round, BoundEnclosure, Interval, SearchOptions};
use crate::radial::{format_rational, int, Dimension};

/// Previously published admissible pairs `(N, λ′_N, β_N)` for
/// `13 ≤ N ≤ 31` with `m = 7/2`. Used for comparison only; certification
/// never reads them.
pub const PUBLISHED_CONSTANTS: [(u32, f64, f64); 19] = [
    (13, 2525.0, 2560.0),
    (14, 3050.0, 3545.0),
    (15, 3610.0, 4765.0),
    (16, 4230.0, 6250.0),
    (17, 4900.0, 8035.0),
    (18, 5650.0, 10155.0),
    (19, 6400.0, 12645.0),
    (20, 7250.0, 15540.0),
    (21, 8150.0, 18890.0),
    (22, 9050.0, 22730.0),
    (23, 10100.0, 27100.0),
    (24, 11100.0, 32050.0),
    (25, 12200.0, 37630.0),
    (26, 13500.0, 43870.0),
    (27, 14500.0, 50800.0),
    (28, 16000.0, 58500.0),
    (29, 17000.0, 67100.0),
    (30, 18500.0, 76500.0),
    (31, 20000.0, 86900.0),
];

pub fn published(n: u32) -> Option<(f64, f64)> {
    PUBLISHED_CONSTANTS
        .iter()
        .find(|row| row.0 == n)
        .map(|row| (row.1, row.2))
}

/// `7/2` up to `N = 31`, `2` from `N = 32` on.
pub fn default_m(n: u32) -> BigRational {
    if n <= 31 {
        BigRational::new(7.into(), 2.into())
    } else {
        int(2)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CertifyConfig {
    pub m: Option<BigRational>,
    pub lambda_prime: Option<Threshold>,
    pub beta: Option<Threshold>,
    pub opts: SearchOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SingularCertified,
    Failed,
}

/// How a report ended, for exit codes: falsified beats inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Certified,
    Inconclusive,
    Falsified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedForm {
    /// `8(N−2)(N−4)e²`.
    pub lambda_prime: Threshold,
    pub h_n: Interval,
    /// `8(N−2)(N−4)e² < H_N`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionReport {
    pub n: u32,
    pub m: String,
    /// Encloses the least admissible `λ′`.
    pub s_n: BoundEnclosure,
    /// Encloses the largest admissible `β`.
    pub i_n: BoundEnclosure,
    /// `I_N.lo − S_N.hi`, rounded down.
    #[serde(with = "crate::interval::float_text")]
    pub margin: f64,
    pub table_lambda: Option<f64>,
    pub table_beta: Option<f64>,
    pub closed_form: Option<ClosedForm>,
    /// The constants checked by the two certificates below.
    pub lambda_prime: Threshold,
    pub beta: Threshold,
    pub cond1: Certificate,
    pub cond2: Certificate,
    pub verdict: Verdict,
}

impl DimensionReport {
    pub fn outcome(&self) -> Outcome {
        let certs = [&self.cond1, &self.cond2];
        if certs.iter().any(|c| c.is_falsified()) {
            return Outcome::Falsified;
        }
        if self.verdict == Verdict::SingularCertified {
            Outcome::Certified
        } else {
            Outcome::Inconclusive
        }
    }

    /// `S_N.hi ≤ λ′_N` and `β_N ≤ I_N.lo` against the published pair.
    pub fn agrees_with_published(&self) -> Option<bool> {
        let (l, b) = (self.table_lambda?, self.table_beta?);
        Some(self.s_n.value.hi() <= l && b <= self.i_n.value.lo() && l < b)
    }
}

fn check_status_ok(c: &Certificate) -> bool {
    c.status == CertStatus::Certified
}

/// Certifies singularity of the extremal solution in dimension `n ≥ 13`.
///
/// Computes the sharp constants, picks `λ′` and `β` (the closed form and
/// `H_N` for `m = 2`, `N ≥ 32`; otherwise points one third into the gap
/// `(S_N.hi, I_N.lo)` from either side), unless overridden, and certifies
/// both hypotheses with them. The verdict is `SingularCertified` iff
/// `S_N.hi < I_N.lo`, both certificates hold and `λ′ < β`.
pub fn certify_dimension(n: u32, cfg: &CertifyConfig) -> Result<DimensionReport, CertifierError> {
    if n < 13 {
        return Err(CertifierError::UnsupportedDimension {
            n,
            reason: "singularity is only claimed for N >= 13".into(),
        });
    }
    let dim = Dimension::new(n)?;
    let m = cfg.m.clone().unwrap_or_else(|| default_m(n));
    let s_n = lambda_prime_enclosure(dim, &m, &cfg.opts)?;
    let i_n = beta_enclosure(dim, &m, &cfg.opts)?;
    let margin = round::sub_down(i_n.value.lo(), s_n.value.hi());

    let closed_form = (m == int(2)).then(|| ClosedForm {
        lambda_prime: closed_form_lambda(dim),
        h_n: Interval::from_rational(&dim.h_n()),
        holds: closed_form_check(dim),
    });
    let (auto_lambda, auto_beta) = match &closed_form {
        Some(cf) if cf.holds => (cf.lambda_prime.clone(), Threshold::rational(dim.h_n())),
        _ => {
            let (s_hi, i_lo) = (s_n.value.hi(), i_n.value.lo());
            if margin > 0.0 {
                let third = margin / 3.0;
                (
                    Threshold::from_f64(round::add_up(s_hi, third))?,
                    Threshold::from_f64(round::sub_down(i_lo, third))?,
                )
            } else {
                (
                    Threshold::from_f64(s_hi)?,
                    Threshold::from_f64(i_lo.max(f64::MIN_POSITIVE))?,
                )
            }
        }
    };
    let lambda_prime = cfg.lambda_prime.clone().unwrap_or(auto_lambda);
    let beta = cfg.beta.clone().unwrap_or(auto_beta);
    let cond1 = check_cond1(dim, &m, &lambda_prime, &cfg.opts)?;
    let cond2 = check_cond2(dim, &m, &beta, &cfg.opts)?;

    let ordered = lambda_prime.enclosure().hi() < beta.enclosure().lo();
    let verdict = if s_n.value.hi() < i_n.value.lo()
        && check_status_ok(&cond1)
        && check_status_ok(&cond2)
        && ordered
    {
        Verdict::SingularCertified
    } else {
        Verdict::Failed
    };
    let (table_lambda, table_beta) = match published(n) {
        Some((l, b)) => (Some(l), Some(b)),
        None => (None, None),
    };
    Ok(DimensionReport {
        n,
        m: format_rational(&m),
        s_n,
        i_n,
        margin,
        table_lambda,
        table_beta,
        closed_form,
        lambda_prime,
        beta,
        cond1,
        cond2,
        verdict,
    })
}
