//! Finite sums `Σ c · r^q · (ln r)^k` with rational `c`, `q` and integer
//! `k ≥ 0`, closed under differentiation and the radial Laplacian.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{format_rational, parse_rational, Dimension, RadialError};
use crate::interval::{Enclose, Interval};

/// The `r^exponent · (ln r)^log_power` part of a term. Orders by exponent
/// first, then log power.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub exponent: BigRational,
    pub log_power: u32,
}

impl Monomial {
    pub fn new(exponent: BigRational, log_power: u32) -> Monomial {
        Monomial {
            exponent,
            log_power,
        }
    }
}

/// Canonical: no zero coefficients, one entry per monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LogPolynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LogPolynomial {
    pub fn zero() -> LogPolynomial {
        LogPolynomial::default()
    }

    pub fn constant(c: BigRational) -> LogPolynomial {
        LogPolynomial::monomial(c, BigRational::zero(), 0)
    }

    /// `c · r^exponent · (ln r)^log_power`.
    pub fn monomial(c: BigRational, exponent: BigRational, log_power: u32) -> LogPolynomial {
        let mut p = LogPolynomial::zero();
        p.add_term(Monomial::new(exponent, log_power), c);
        p
    }

    /// `r^exponent`.
    pub fn power(exponent: BigRational) -> LogPolynomial {
        LogPolynomial::monomial(BigRational::one(), exponent, 0)
    }

    /// `ln r`.
    pub fn ln_r() -> LogPolynomial {
        LogPolynomial::monomial(BigRational::one(), BigRational::zero(), 1)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponent: &BigRational, log_power: u32) -> BigRational {
        self.terms
            .get(&Monomial::new(exponent.clone(), log_power))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn has_log_terms(&self) -> bool {
        self.terms.keys().any(|m| m.log_power > 0)
    }

    pub fn scale(&self, c: &BigRational) -> LogPolynomial {
        if c.is_zero() {
            return LogPolynomial::zero();
        }
        LogPolynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by `r^shift`.
    pub fn mul_power(&self, shift: &BigRational) -> LogPolynomial {
        LogPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (Monomial::new(&m.exponent + shift, m.log_power), v.clone()))
                .collect(),
        }
    }

    /// `d/dr`, term by term.
    pub fn derivative(&self) -> LogPolynomial {
        let mut out = LogPolynomial::zero();
        let minus_one = rat(-1);
        for (m, c) in &self.terms {
            let q = &m.exponent;
            let k = m.log_power;
            // d(r^q ln^k r) = q r^(q-1) ln^k r + k r^(q-1) ln^(k-1) r
            out.add_term(Monomial::new(q + &minus_one, k), c * q);
            if k > 0 {
                out.add_term(Monomial::new(q + &minus_one, k - 1), c * rat(k as i64));
            }
        }
        out
    }

    /// Radial Laplacian `f'' + (N-1)/r f'` in dimension `n`.
    pub fn laplacian(&self, n: Dimension) -> LogPolynomial {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        d2 + d1.mul_power(&rat(-1)).scale(&rat(n.get() as i64 - 1))
    }

    pub fn bilaplacian(&self, n: Dimension) -> LogPolynomial {
        self.laplacian(n).laplacian(n)
    }

    /// Exact value at `r = 1`, where every logarithmic term vanishes.
    pub fn value_at_one(&self) -> BigRational {
        self.terms
            .iter()
            .filter(|(m, _)| m.log_power == 0)
            .map(|(_, c)| c.clone())
            .sum()
    }

    /// Floating-point value at `r > 0`.
    pub fn eval(&self, r: f64) -> f64 {
        let ln = r.ln();
        self.terms
            .iter()
            .map(|(m, c)| {
                let q = m.exponent.to_f64().unwrap_or(f64::NAN);
                c.to_f64().unwrap_or(f64::NAN) * r.powf(q) * ln.powi(m.log_power as i32)
            })
            .sum()
    }

    /// Interval extension over `r ⊂ [0, ∞)`; the natural term-wise sum.
    pub fn enclose(&self, r: Interval) -> Interval {
        self.compile().enclose(r)
    }

    /// Floating-point coefficients for repeated interval evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| CompiledTerm {
                    coeff: Interval::from_rational(c),
                    num: m
                        .exponent
                        .numer()
                        .to_i64()
                        .expect("exponent numerator fits in i64"),
                    den: m
                        .exponent
                        .denom()
                        .to_i64()
                        .expect("exponent denominator fits in i64"),
                    log_power: m.log_power,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: Interval,
    num: i64,
    den: i64,
    log_power: u32,
}

/// A [`LogPolynomial`] with interval coefficients, ready for fast
/// enclosure.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<CompiledTerm>,
}

impl CompiledPoly {
    pub fn enclose(&self, r: Interval) -> Interval {
        let mut acc = Interval::ZERO;
        let needs_ln = self.terms.iter().any(|t| t.log_power > 0);
        let ln = if needs_ln {
            r.ln().unwrap_or(Interval::ENTIRE)
        } else {
            Interval::ZERO
        };
        for t in &self.terms {
            let mut v = if t.num == 0 {
                t.coeff
            } else {
                t.coeff * r.pow_ratio(t.num, t.den).unwrap_or(Interval::ENTIRE)
            };
            if t.log_power > 0 {
                v = v * ln.powi(t.log_power as i32);
            }
            acc = acc + v;
        }
        acc
    }
}

impl Enclose for CompiledPoly {
    fn enclose(&self, r: Interval) -> Interval {
        CompiledPoly::enclose(self, r)
    }
}

impl Add for LogPolynomial {
    type Output = LogPolynomial;
    fn add(mut self, rhs: LogPolynomial) -> LogPolynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Add for &LogPolynomial {
    type Output = LogPolynomial;
    fn add(self, rhs: &LogPolynomial) -> LogPolynomial {
        self.clone() + rhs.clone()
    }
}

impl Neg for LogPolynomial {
    type Output = LogPolynomial;
    fn neg(self) -> LogPolynomial {
        LogPolynomial {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for &LogPolynomial {
    type Output = LogPolynomial;
    fn neg(self) -> LogPolynomial {
        -self.clone()
    }
}

impl Sub for LogPolynomial {
    type Output = LogPolynomial;
    fn sub(self, rhs: LogPolynomial) -> LogPolynomial {
        self + (-rhs)
    }
}

impl Sub for &LogPolynomial {
    type Output = LogPolynomial;
    fn sub(self, rhs: &LogPolynomial) -> LogPolynomial {
        self.clone() - rhs.clone()
    }
}

impl Mul for &LogPolynomial {
    type Output = LogPolynomial;
    fn mul(self, rhs: &LogPolynomial) -> LogPolynomial {
        let mut out = LogPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(
                    Monomial::new(&ma.exponent + &mb.exponent, ma.log_power + mb.log_power),
                    ca * cb,
                );
            }
        }
        out
    }
}

impl Mul for LogPolynomial {
    type Output = LogPolynomial;
    fn mul(self, rhs: LogPolynomial) -> LogPolynomial {
        &self * &rhs
    }
}

/// Written as `c*r^(q)*ln(r)^k` terms joined by ` + ` / ` - `, in canonical
/// order. The zero polynomial prints as `0`.
impl fmt::Display for LogPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            let bare = m.exponent.is_zero() && m.log_power == 0;
            if !mag.is_one() || bare {
                factors.push(format_rational(&mag));
            }
            if m.exponent.is_one() {
                factors.push("r".to_string());
            } else if !m.exponent.is_zero() {
                factors.push(format!("r^({})", format_rational(&m.exponent)));
            }
            match m.log_power {
                0 => {}
                1 => factors.push("ln(r)".to_string()),
                k => factors.push(format!("ln(r)^{k}")),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Parses sums of products of rationals, `r`, `r^q`, `r^(q)`, `ln(r)` and
/// `ln(r)^k`. Accepts everything [`Display`](fmt::Display) produces.
impl FromStr for LogPolynomial {
    type Err = RadialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(RadialError::Parse("empty log-polynomial".into()));
        }
        let mut out = LogPolynomial::zero();
        for (sign, term) in split_terms(&compact)? {
            let mut p = LogPolynomial::constant(rat(sign));
            for factor in term.split('*') {
                p = &p * &parse_factor(factor)?;
            }
            out = out + p;
        }
        Ok(out)
    }
}

/// Splits at top-level `+`/`-`, ignoring signs inside parentheses or right
/// after an exponent marker.
fn split_terms(s: &str) -> Result<Vec<(i64, &str)>, RadialError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut sign = 1i64;
    if let Some(&b) = bytes.first() {
        if b == b'-' || b == b'+' {
            sign = if b == b'-' { -1 } else { 1 };
            start = 1;
        }
    }
    let mut i = start;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-'
                if depth == 0
                    && i > start
                    && !matches!(bytes[i - 1], b'^' | b'e' | b'E' | b'*') =>
            {
                out.push((sign, &s[start..i]));
                sign = if b == b'-' { -1 } else { 1 };
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(RadialError::Parse(format!(
                "unbalanced parentheses in {s:?}"
            )));
        }
        i += 1;
    }
    if depth != 0 || start >= bytes.len() {
        return Err(RadialError::Parse(format!(
            "malformed log-polynomial {s:?}"
        )));
    }
    out.push((sign, &s[start..]));
    Ok(out)
}

fn parse_exponent(s: &str) -> Result<BigRational, RadialError> {
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .unwrap_or(s);
    parse_rational(inner)
}

fn parse_factor(f: &str) -> Result<LogPolynomial, RadialError> {
    if let Some(rest) = f.strip_prefix("ln(r)") {
        let k = if rest.is_empty() {
            1
        } else {
            let k = rest
                .strip_prefix('^')
                .ok_or_else(|| RadialError::Parse(format!("bad factor {f:?}")))?;
            let k = k
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .unwrap_or(k);
            k.parse::<u32>()
                .map_err(|_| RadialError::Parse(format!("bad log power in {f:?}")))?
        };
        return Ok(LogPolynomial::monomial(
            BigRational::one(),
            BigRational::zero(),
            k,
        ));
    }
    if let Some(rest) = f.strip_prefix('r') {
        let q = if rest.is_empty() {
            BigRational::one()
        } else {
            let e = rest
                .strip_prefix('^')
                .ok_or_else(|| RadialError::Parse(format!("bad factor {f:?}")))?;
            parse_exponent(e)?
        };
        return Ok(LogPolynomial::power(q));
    }
    Ok(LogPolynomial::constant(parse_rational(f)?))
}
