//! Outward-rounded interval arithmetic and rigorous one-dimensional bounds.
//!
//! Every operation returns an interval that contains the exact real result
//! for all arguments in its inputs. Rounding is handled inside
//! [`round`](self::round) so the rest of the crate never touches it.

pub mod bnb;
pub mod elementary;
pub mod round;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use bnb::{certified_inf, certified_sup, BoundEnclosure, Enclose, SearchOptions, SearchStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("{op} is undefined on {arg}")]
    Domain { op: &'static str, arg: String },
    #[error("invalid interval bounds [{0}, {1}]")]
    InvalidBounds(String, String),
}

/// A closed interval `[lo, hi]` of extended reals.
///
/// Bounds may be infinite (`[-inf, x]`, `[x, +inf]`, the whole line) but an
/// interval never contains an infinity as a point. The empty set is the
/// distinct value [`Interval::EMPTY`]; `lo > hi` is never stored.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::NAN,
        hi: f64::NAN,
    };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Panics on `lo > hi`, NaN bounds or a bound that is an infinite point.
    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval::try_new(lo, hi).expect("invalid interval")
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(IntervalError::InvalidBounds(lo.to_string(), hi.to_string()));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    /// Builds an interval from raw bounds, repairing NaNs to infinities.
    fn outward(lo: f64, hi: f64) -> Interval {
        let lo = if lo.is_nan() {
            f64::NEG_INFINITY
        } else if lo == f64::INFINITY {
            f64::MAX
        } else {
            lo
        };
        let hi = if hi.is_nan() {
            f64::INFINITY
        } else if hi == f64::NEG_INFINITY {
            f64::MIN
        } else {
            hi
        };
        Interval { lo, hi }
    }

    /// Tightest binary64 enclosure of an exact rational.
    pub fn from_rational(q: &BigRational) -> Interval {
        if q.is_integer() {
            if let Some(v) = q.to_integer().to_i64() {
                if v.unsigned_abs() <= (1u64 << 53) {
                    return Interval::point(v as f64);
                }
            }
        }
        let guess = q.to_f64().unwrap_or(f64::NAN);
        if !guess.is_finite() {
            return if q.is_positive() {
                Interval {
                    lo: f64::MAX,
                    hi: f64::INFINITY,
                }
            } else {
                Interval {
                    lo: f64::NEG_INFINITY,
                    hi: f64::MIN,
                }
            };
        }
        let exact = |x: f64| BigRational::from_f64(x).expect("finite");
        let mut lo = guess;
        while exact(lo) > *q {
            lo = lo.next_down();
        }
        let mut hi = guess;
        while exact(hi) < *q {
            hi = hi.next_up();
        }
        Interval { lo, hi }
    }

    pub fn from_integer(n: i64) -> Interval {
        Interval::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn is_empty(self) -> bool {
        self.lo.is_nan()
    }

    /// True when either bound is infinite, e.g. after dividing by an
    /// interval that contains zero.
    pub fn is_unbounded(self) -> bool {
        !self.is_empty() && (self.lo.is_infinite() || self.hi.is_infinite())
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    /// Upper bound of `hi - lo`.
    pub fn width(self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        round::sub_up(self.hi, self.lo)
    }

    /// A point inside the interval (not necessarily the exact midpoint).
    pub fn mid(self) -> f64 {
        if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
            return 0.0;
        }
        if self.lo == f64::NEG_INFINITY {
            return f64::MIN;
        }
        if self.hi == f64::INFINITY {
            return f64::MAX;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(self, x: f64) -> bool {
        !self.is_empty() && self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(self, other: Interval) -> bool {
        other.is_empty() || (!self.is_empty() && self.lo <= other.lo && other.hi <= self.hi)
    }

    pub fn hull(self, other: Interval) -> Interval {
        if self.is_empty() {
            return other;
        }
        if other.is_empty() {
            return self;
        }
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(self, other: Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            Interval::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    /// Splits at the midpoint. Both halves share the midpoint.
    pub fn bisect(self) -> (Interval, Interval) {
        let m = self.mid();
        (
            Interval { lo: self.lo, hi: m },
            Interval { lo: m, hi: self.hi },
        )
    }

    pub fn abs(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn sqr(self) -> Interval {
        self.powi(2)
    }

    /// Integer power, exact sign handling for even exponents.
    pub fn powi(self, n: i32) -> Interval {
        if self.is_empty() {
            return self;
        }
        if n == 0 {
            return Interval::ONE;
        }
        if n < 0 {
            return Interval::ONE / self.powi(-n);
        }
        let n = n as u64;
        let up = |x: f64| elementary::powi_nonneg_bounds(x, n);
        if n % 2 == 0 {
            let lo = up(self.mig()).0;
            let hi = up(self.mag()).1;
            Interval::outward(lo, hi)
        } else {
            let bound = |x: f64| -> (f64, f64) {
                if x >= 0.0 {
                    up(x)
                } else {
                    let (l, h) = up(-x);
                    (-h, -l)
                }
            };
            Interval::outward(bound(self.lo).0, bound(self.hi).1)
        }
    }

    pub fn sqrt(self) -> Result<Interval, IntervalError> {
        if self.is_empty() {
            return Ok(self);
        }
        if self.hi < 0.0 {
            return Err(self.domain_error("sqrt"));
        }
        let lo = round::sqrt_down(self.lo.max(0.0));
        let hi = round::sqrt_up(self.hi);
        Ok(Interval { lo, hi })
    }

    pub fn exp(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval::outward(
            elementary::exp_bounds(self.lo).0,
            elementary::exp_bounds(self.hi).1,
        )
    }

    /// Natural logarithm. A lower bound at or below zero maps to `-inf`.
    pub fn ln(self) -> Result<Interval, IntervalError> {
        if self.is_empty() {
            return Ok(self);
        }
        if self.hi <= 0.0 {
            return Err(self.domain_error("ln"));
        }
        let lo = if self.lo <= 0.0 {
            f64::NEG_INFINITY
        } else {
            elementary::ln_bounds(self.lo).0
        };
        let hi = elementary::ln_bounds(self.hi).1;
        Ok(Interval { lo, hi })
    }

    /// `x^(num/den)` with the fraction in lowest terms and `den > 0`.
    ///
    /// Integer exponents accept any sign of `x`. Otherwise the interval must
    /// lie in `[0, inf)`; at `x = 0` the limit convention gives `0` for
    /// positive and `+inf` for negative exponents.
    pub fn pow_ratio(self, num: i64, den: i64) -> Result<Interval, IntervalError> {
        assert!(den > 0, "exponent denominator must be positive");
        if self.is_empty() {
            return Ok(self);
        }
        if den == 1 {
            let n = i32::try_from(num).map_err(|_| self.domain_error("pow"))?;
            return Ok(self.powi(n));
        }
        if self.lo < 0.0 {
            return Err(self.domain_error("pow"));
        }
        let a = elementary::pow_rational_bounds(self.lo, num, den);
        let b = elementary::pow_rational_bounds(self.hi, num, den);
        let (lo, hi) = if num >= 0 { (a.0, b.1) } else { (b.0, a.1) };
        Ok(Interval::outward(lo, hi))
    }

    /// Real power with an exact rational exponent.
    pub fn pow_rational(self, q: &BigRational) -> Result<Interval, IntervalError> {
        let num = q.numer().to_i64().ok_or_else(|| self.domain_error("pow"))?;
        let den = q.denom().to_i64().ok_or_else(|| self.domain_error("pow"))?;
        self.pow_ratio(num, den)
    }

    /// Strictly below zero.
    pub fn is_negative(self) -> bool {
        !self.is_empty() && self.hi < 0.0
    }

    /// Strictly above zero.
    pub fn is_positive(self) -> bool {
        !self.is_empty() && self.lo > 0.0
    }

    fn domain_error(self, op: &'static str) -> IntervalError {
        IntervalError::Domain {
            op,
            arg: self.to_string(),
        }
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::ZERO
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[empty]")
        } else {
            write!(f, "[{:?}, {:?}]", self.lo, self.hi)
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval::outward(
            round::add_down(self.lo, rhs.lo),
            round::add_up(self.hi, rhs.hi),
        )
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        self + (-rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = (self, rhs);
        let lows = [
            round::mul_down(a.lo, b.lo),
            round::mul_down(a.lo, b.hi),
            round::mul_down(a.hi, b.lo),
            round::mul_down(a.hi, b.hi),
        ];
        let highs = [
            round::mul_up(a.lo, b.lo),
            round::mul_up(a.lo, b.hi),
            round::mul_up(a.hi, b.lo),
            round::mul_up(a.hi, b.hi),
        ];
        let lo = lows.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = highs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::outward(lo, hi)
    }
}

impl Div for Interval {
    type Output = Interval;
    /// Division by an interval containing zero yields a half-line or the
    /// whole line instead of an error; check [`Interval::is_unbounded`].
    fn div(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = (self, rhs);
        if b.lo > 0.0 || b.hi < 0.0 {
            let lows = [
                round::div_down(a.lo, b.lo),
                round::div_down(a.lo, b.hi),
                round::div_down(a.hi, b.lo),
                round::div_down(a.hi, b.hi),
            ];
            let highs = [
                round::div_up(a.lo, b.lo),
                round::div_up(a.lo, b.hi),
                round::div_up(a.hi, b.lo),
                round::div_up(a.hi, b.hi),
            ];
            let lo = lows
                .iter()
                .copied()
                .filter(|v| !v.is_nan())
                .fold(f64::INFINITY, f64::min);
            let hi = highs
                .iter()
                .copied()
                .filter(|v| !v.is_nan())
                .fold(f64::NEG_INFINITY, f64::max);
            return Interval::outward(lo, hi);
        }
        // b contains zero.
        if b.lo == 0.0 && b.hi > 0.0 {
            if a.lo > 0.0 {
                return Interval::outward(round::div_down(a.lo, b.hi), f64::INFINITY);
            }
            if a.hi < 0.0 {
                return Interval::outward(f64::NEG_INFINITY, round::div_up(a.hi, b.hi));
            }
        }
        if b.hi == 0.0 && b.lo < 0.0 {
            if a.lo > 0.0 {
                return Interval::outward(f64::NEG_INFINITY, round::div_up(a.lo, b.lo));
            }
            if a.hi < 0.0 {
                return Interval::outward(round::div_down(a.hi, b.lo), f64::INFINITY);
            }
        }
        Interval::ENTIRE
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

/// Bounds are written as shortest round-trip decimal strings, so parsing
/// them back yields the identical binary64 values.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalRepr {
    lo: String,
    hi: String,
    rounding: String,
}

const ROUNDING_NOTE: &str = "outward: lo rounded down, hi rounded up";

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: format!("{:?}", self.lo),
            hi: format!("{:?}", self.hi),
            rounding: ROUNDING_NOTE.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = IntervalRepr::deserialize(deserializer)?;
        let lo: f64 = repr.lo.parse().map_err(D::Error::custom)?;
        let hi: f64 = repr.hi.parse().map_err(D::Error::custom)?;
        if lo.is_nan() && hi.is_nan() {
            return Ok(Interval::EMPTY);
        }
        Interval::try_new(lo, hi).map_err(D::Error::custom)
    }
}

/// Serde adapter writing an `f64` as its shortest round-trip decimal string,
/// so that infinities and NaN survive JSON.
pub mod float_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{x:?}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact comparison of a binary64 value against a rational.
pub fn float_cmp_rational(x: f64, q: &BigRational) -> Option<std::cmp::Ordering> {
    if x.is_nan() {
        return None;
    }
    if x.is_infinite() {
        return Some(if x > 0.0 {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Less
        });
    }
    let exact = BigRational::from_f64(x)?;
    Some(exact.cmp(q))
}

/// Whether the rational lies inside the interval, compared exactly.
pub fn contains_rational(x: Interval, q: &BigRational) -> bool {
    use std::cmp::Ordering::*;
    if x.is_empty() {
        return false;
    }
    matches!(float_cmp_rational(x.lo, q), Some(Less | Equal))
        && matches!(float_cmp_rational(x.hi, q), Some(Greater | Equal))
}
