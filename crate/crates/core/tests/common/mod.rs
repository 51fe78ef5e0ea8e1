//! Exact rational oracles shared by the integration tests.
//!
//! Every interval result is checked against a value or a pair of bounds
//! computed with `BigRational`, so a pass never depends on floating-point
//! rounding in the oracle itself.

#![allow(dead_code)]

use extremal_core::interval::{contains_rational, float_cmp_rational};
use extremal_core::radial::{Dimension, LogPolynomial};
use extremal_core::Interval;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

/// Working precision of the exponential oracle, in bits after the point.
const BITS: usize = 320;

pub fn q(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite")
}

fn floor_to_bits(x: &BigRational) -> BigRational {
    let scale = BigInt::one() << BITS;
    BigRational::new(
        (x * BigRational::from_integer(scale.clone()))
            .floor()
            .to_integer(),
        scale,
    )
}

fn ceil_to_bits(x: &BigRational) -> BigRational {
    let scale = BigInt::one() << BITS;
    BigRational::new(
        (x * BigRational::from_integer(scale.clone()))
            .ceil()
            .to_integer(),
        scale,
    )
}

/// Rigorous rational bounds `lo ≤ exp(x) ≤ hi`.
///
/// Halves `x` until `|y| ≤ 1/2`, sums 40 Taylor terms with the remainder
/// bound `2|y|^41/41!`, then squares back with outward rounding.
pub fn exp_bounds(x: &BigRational) -> (BigRational, BigRational) {
    let half = BigRational::new(1.into(), 2.into());
    let mut y = x.clone();
    let mut k = 0u32;
    while y.abs() > half {
        y /= BigRational::from_integer(2.into());
        k += 1;
    }
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    const TERMS: u32 = 40;
    for j in 1..=TERMS {
        term = floor_to_bits(&(term * &y / BigRational::from_integer(j.into())));
        sum += &term;
    }
    // Truncation errors propagate with factor |y|/j ≤ 1/2, so each term is
    // off by at most 2^(1−BITS); the tail obeys the Lagrange bound.
    let mut tail = y.abs();
    for j in 1..=TERMS + 1 {
        tail = tail * y.abs() / BigRational::from_integer(j.into());
    }
    let slack = tail * BigRational::from_integer(2.into())
        + BigRational::new(BigInt::from(TERMS + 1), BigInt::one() << (BITS - 8));
    let mut lo = floor_to_bits(&(&sum - &slack));
    let mut hi = ceil_to_bits(&(&sum + &slack));
    for _ in 0..k {
        lo = floor_to_bits(&(&lo * &lo));
        hi = ceil_to_bits(&(&hi * &hi));
    }
    (lo, hi)
}

/// `exp(a) ≤ exp(x) ≤ exp(b)` is certified for the enclosure `[a, b]`.
pub fn encloses_exp(out: Interval, x: f64) -> bool {
    let xq = q(x);
    let (lo, hi) = exp_bounds(&xq);
    le_float(out.lo(), &lo) && ge_float(out.hi(), &hi)
}

/// `[a, b] ∋ ln x` iff `exp(a) ≤ x ≤ exp(b)`.
pub fn encloses_ln(out: Interval, x: f64) -> bool {
    let xq = q(x);
    let low_ok = out.lo() == f64::NEG_INFINITY || exp_bounds(&q(out.lo())).1 <= xq;
    let high_ok = out.hi() == f64::INFINITY || exp_bounds(&q(out.hi())).0 >= xq;
    low_ok && high_ok
}

/// `[a, b] ∋ x^(p/d)` for `x > 0`, `d > 0`, decided through `d`-th powers.
pub fn encloses_pow(out: Interval, x: f64, p: i64, d: u32) -> bool {
    let xq = q(x);
    let target = pow_int(&xq, p);
    let low_ok = out.lo() <= 0.0 || pow_int(&q(out.lo()), d as i64) <= target;
    let high_ok = out.hi() == f64::INFINITY || pow_int(&q(out.hi()), d as i64) >= target;
    low_ok && high_ok
}

pub fn pow_int(x: &BigRational, p: i64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..p.unsigned_abs() {
        out *= x;
    }
    if p < 0 {
        out.recip()
    } else {
        out
    }
}

pub fn le_float(x: f64, v: &BigRational) -> bool {
    matches!(
        float_cmp_rational(x, v),
        Some(Ordering::Less | Ordering::Equal)
    )
}

pub fn ge_float(x: f64, v: &BigRational) -> bool {
    matches!(
        float_cmp_rational(x, v),
        Some(Ordering::Greater | Ordering::Equal)
    )
}

pub fn contains(out: Interval, v: &BigRational) -> bool {
    contains_rational(out, v)
}

/// A finite double with a random sign and a binary exponent in `±span`.
pub fn random_float(rng: &mut ChaCha8Rng, span: i32) -> f64 {
    let mantissa: f64 = rng.gen_range(1.0..2.0);
    let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    sign * mantissa * 2f64.powi(rng.gen_range(-span..=span))
}

/// A random interval and a double inside it.
pub fn random_interval(rng: &mut ChaCha8Rng, span: i32) -> (Interval, f64) {
    let a = random_float(rng, span);
    let b = if rng.gen_bool(0.2) {
        a
    } else {
        random_float(rng, span)
    };
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let x = if rng.gen_bool(0.1) {
        lo
    } else {
        rng.gen_range(lo..=hi)
    };
    (Interval::new(lo, hi), x)
}

/// Kinds of point-in-enclosure check, one per interval operation.
pub const OPS: [&str; 12] = [
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "sqr",
    "powi",
    "sqrt",
    "exp",
    "ln",
    "pow_ratio",
    "hull",
];

/// Runs `count` randomized checks: pick input intervals, a point in each,
/// apply the interval operation, and test that the exact result at the
/// points lies in the output. Returns the failures as descriptions.
pub fn point_in_enclosure_checks(seed: u64, count: usize) -> Vec<String> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..count {
        let op = OPS[i % OPS.len()];
        let (a, x) = random_interval(&mut rng, 30);
        let (b, y) = random_interval(&mut rng, 30);
        let ok = match op {
            "add" => contains(a + b, &(q(x) + q(y))),
            "sub" => contains(a - b, &(q(x) - q(y))),
            "mul" => contains(a * b, &(q(x) * q(y))),
            "div" => y == 0.0 || contains(a / b, &(q(x) / q(y))),
            "neg" => contains(-a, &(-q(x))),
            "sqr" => contains(a.sqr(), &(q(x) * q(x))),
            "powi" => {
                let n = rng.gen_range(-4..=7);
                x == 0.0 && n < 0 || contains(a.powi(n), &pow_int(&q(x), n as i64))
            }
            "sqrt" => {
                let (a, x) = (a.abs(), x.abs());
                let out = a.sqrt().expect("non-negative");
                // lo² ≤ x ≤ hi².
                q(out.lo()) * q(out.lo()) <= q(x) && q(out.hi()) * q(out.hi()) >= q(x)
            }
            "exp" => {
                // Keep the oracle cheap and away from overflow.
                let (a, x) = shrink(a, x, 40.0);
                encloses_exp(a.exp(), x)
            }
            "ln" => {
                let (a, x) = (a.abs(), x.abs());
                x == 0.0 || encloses_ln(a.ln().expect("positive"), x)
            }
            "pow_ratio" => {
                let (a, x) = (a.abs(), x.abs());
                let d: u32 = rng.gen_range(2..=5);
                let mut p: i64 = rng.gen_range(-9..=9);
                while num_integer::gcd(p, d as i64) != 1 {
                    p += 1;
                }
                x == 0.0 || encloses_pow(a.pow_ratio(p, d as i64).expect("non-negative"), x, p, d)
            }
            "hull" => {
                let h = a.hull(b);
                contains(h, &q(x)) && contains(h, &q(y))
            }
            _ => unreachable!(),
        };
        if !ok {
            failures.push(format!("check {i}: {op} on {a:?}, {b:?} at ({x:e}, {y:e})"));
        }
    }
    failures
}

/// Rescales an interval and its point into `[-bound, bound]`.
fn shrink(a: Interval, x: f64, bound: f64) -> (Interval, f64) {
    let m = a.mag();
    if m <= bound {
        return (a, x);
    }
    // Exact power-of-two scaling keeps the point inside.
    let k = (m / bound).log2().ceil() as i32;
    let s = 2f64.powi(-k);
    (Interval::new(a.lo() * s, a.hi() * s), x * s)
}

/// A random log-polynomial: up to five terms `c r^(p/q) (ln r)^k` with small
/// integer `c`, `p/q ∈ [−4, 16]` and `k ≤ 2`.
pub fn random_logpoly(rng: &mut ChaCha8Rng) -> LogPolynomial {
    let mut p = LogPolynomial::zero();
    for _ in 0..rng.gen_range(1..=5) {
        let c = BigRational::from_integer(rng.gen_range(-9i64..=9).into());
        let e = BigRational::new(
            rng.gen_range(-4i64..=16).into(),
            rng.gen_range(1i64..=3).into(),
        );
        p = p + LogPolynomial::monomial(c, e, rng.gen_range(0..=2));
    }
    p
}

/// `f'' + (N−1)/r f'` by central differences with one Richardson step.
pub fn fd_laplacian(p: &LogPolynomial, n: u32, r: f64) -> f64 {
    let lap = |h: f64| {
        let (fm, f0, fp) = (p.eval(r - h), p.eval(r), p.eval(r + h));
        (fp - 2.0 * f0 + fm) / (h * h) + (n as f64 - 1.0) / r * (fp - fm) / (2.0 * h)
    };
    let h = 1e-3 * r;
    (4.0 * lap(h / 2.0) - lap(h)) / 3.0
}

/// Sum of the absolute term values: the scale against which cancellation
/// in a sum of monomials is measured.
pub fn magnitude(p: &LogPolynomial, r: f64) -> f64 {
    p.terms()
        .map(|(m, c)| {
            LogPolynomial::monomial(c.clone(), m.exponent.clone(), m.log_power)
                .eval(r)
                .abs()
        })
        .sum()
}

/// Largest relative gap between the symbolic and finite-difference
/// Laplacians over `count` random log-polynomials, dimensions and radii.
pub fn worst_laplacian_gap(seed: u64, count: usize) -> f64 {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let p = random_logpoly(&mut rng);
        let n = rng.gen_range(5..=40);
        let r = rng.gen_range(0.05..0.95);
        let exact = p.laplacian(Dimension::new(n).expect("positive"));
        let gap = (exact.eval(r) - fd_laplacian(&p, n, r)).abs()
            / magnitude(&exact, r).max(f64::MIN_POSITIVE);
        worst = worst.max(gap);
    }
    worst
}
