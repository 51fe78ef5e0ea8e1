//! Exact calculus for radial functions on the unit ball in `R^N`.
//!
//! [`LogPolynomial`] carries the symbolic algebra (rational coefficients and
//! exponents, so cancellations are exact). [`ExprTree`] composes
//! log-polynomials with `exp`, products and quotients for interval
//! evaluation. [`named`] assembles the specific radial functions used by the
//! certifier.

pub mod expr;
pub mod logpoly;
pub mod named;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expr::{Centered, CompiledExpr, ExprTree};
pub use logpoly::{CompiledPoly, LogPolynomial, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadialError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Spatial dimension `N ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Dimension, RadialError> {
        if n == 0 {
            return Err(RadialError::Domain("dimension must be at least 1".into()));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn rational(self) -> BigRational {
        int(self.0 as i64)
    }

    /// `N²(N−4)²/16`, the classical Hardy-Rellich constant.
    pub fn h_n(self) -> BigRational {
        let n = self.rational();
        let m4 = &n - int(4);
        &n * &n * &m4 * &m4 / int(16)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = RadialError;
    fn try_from(n: u32) -> Result<Self, Self::Error> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"7/2"`, `"-3"`, `"3.5"` or `"1.25e-2"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, RadialError> {
    let err = || RadialError::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(RadialError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let all: BigInt = format!("0{whole}{frac}").parse().map_err(|_| err())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(all);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -q } else { q })
}

/// Shortest exact text for a rational: `7/2`, `-3`.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_n_values() {
        assert_eq!(
            Dimension::new(13).unwrap().h_n(),
            BigRational::new(13689.into(), 16.into())
        );
        assert_eq!(Dimension::new(22).unwrap().h_n(), int(9801));
        assert_eq!(Dimension::new(32).unwrap().h_n(), int(50176));
    }

    #[test]
    fn rational_parsing() {
        let half7 = BigRational::new(7.into(), 2.into());
        assert_eq!(parse_rational("7/2").unwrap(), half7);
        assert_eq!(parse_rational("3.5").unwrap(), half7);
        assert_eq!(parse_rational("35e-1").unwrap(), half7);
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(
            parse_rational(".5").unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("-").is_err());
        assert_eq!(format_rational(&half7), "7/2");
    }

    #[test]
    fn dimension_zero_rejected() {
        assert!(Dimension::new(0).is_err());
        assert!(serde_json::from_str::<Dimension>("0").is_err());
        assert_eq!(serde_json::from_str::<Dimension>("13").unwrap().get(), 13);
    }
}
