//! Interval certificates for the pointwise inequalities of the singularity
//! argument, and per-dimension reports.
//!
//! Every claim is first rewritten exactly (multiplying by `r⁴` or by
//! positive denominators) so that its residual is continuous on a closed
//! sub-interval of `[0, 1]`, then handed to the sign certifier or to the
//! branch-and-bound search.

pub mod conditions;
pub mod hardy;
pub mod report;
pub mod sign;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::interval::Interval;
use crate::radial::{format_rational, parse_rational, RadialError};

pub use conditions::{
    beta_enclosure, check_cond1, check_cond2, closed_form_check, closed_form_lambda,
    lambda_prime_enclosure, E2_HI, E2_LO, TAIL_DELTA,
};
pub use hardy::{
    check_bessel_supersolution, check_hr_domination, check_phi_identity, check_vr_over_v,
    classical_hr_threshold, ThresholdRow, ThresholdScan,
};
pub use report::{
    certify_dimension, default_m, published, CertifyConfig, ClosedForm, DimensionReport, Outcome,
    Verdict, PUBLISHED_CONSTANTS,
};
pub use sign::{certify_sign, CertStatus, Certificate, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifierError {
    #[error("unsupported dimension N = {n}: {reason}")]
    UnsupportedDimension { n: u32, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Radial(#[from] RadialError),
}

/// A positive constant of the form `coeff · e^shift` with rational `coeff`
/// and `shift`.
///
/// Keeping the exponential factor symbolic lets it cancel against the
/// exponential in a residual, so that claims which touch zero (such as the
/// closed-form `λ′ = 8(N−2)(N−4)e²`) are decided without rounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    pub coeff: BigRational,
    pub exp_shift: BigRational,
}

impl Threshold {
    pub fn rational(coeff: BigRational) -> Threshold {
        Threshold {
            coeff,
            exp_shift: BigRational::zero(),
        }
    }

    pub fn scaled_exp(coeff: BigRational, exp_shift: BigRational) -> Threshold {
        Threshold { coeff, exp_shift }
    }

    /// The exact binary value of `x`.
    pub fn from_f64(x: f64) -> Result<Threshold, CertifierError> {
        let q = BigRational::from_f64(x)
            .ok_or_else(|| CertifierError::InvalidParameter(format!("{x} is not finite")))?;
        Ok(Threshold::rational(q))
    }

    pub fn integer(n: i64) -> Threshold {
        Threshold::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn enclosure(&self) -> Interval {
        let c = Interval::from_rational(&self.coeff);
        if self.exp_shift.is_zero() {
            c
        } else {
            c * Interval::from_rational(&self.exp_shift).exp()
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp_shift.is_zero() {
            write!(f, "{}", format_rational(&self.coeff))
        } else {
            write!(
                f,
                "{}*e^({})",
                format_rational(&self.coeff),
                format_rational(&self.exp_shift)
            )
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdRepr {
    coeff: String,
    exp_shift: String,
    value: Interval,
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ThresholdRepr {
            coeff: format_rational(&self.coeff),
            exp_shift: format_rational(&self.exp_shift),
            value: self.enclosure(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ThresholdRepr::deserialize(d)?;
        Ok(Threshold {
            coeff: parse_rational(&repr.coeff).map_err(D::Error::custom)?,
            exp_shift: parse_rational(&repr.exp_shift).map_err(D::Error::custom)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_round_trips_through_json() {
        let t = Threshold::scaled_exp(
            BigRational::from_integer(6720.into()),
            BigRational::from_integer(2.into()),
        );
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Threshold>(&json).unwrap(), t);
        assert!(t.enclosure().contains(6720.0 * std::f64::consts::E.powi(2)));
        assert_eq!(t.to_string(), "6720*e^(2)");
    }

    #[test]
    fn float_threshold_is_exact() {
        let t = Threshold::from_f64(0.1).unwrap();
        assert_eq!(t.enclosure(), Interval::point(0.1));
        assert!(Threshold::from_f64(f64::NAN).is_err());
    }
}
