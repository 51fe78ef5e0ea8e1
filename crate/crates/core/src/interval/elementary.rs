//! Rigorous bounds for `exp`, `ln` and real powers at a single point.
//!
//! `exp` uses argument reduction `x = k ln 2 + r` with `|r| <= ln 2 / 2`, an
//! interval Horner evaluation of the degree-20 Taylor polynomial and an
//! explicit Lagrange remainder. `ln` is obtained by inverting `exp` through
//! monotonicity, so it inherits the same guarantees without a separate
//! series. Nothing here trusts the accuracy of the platform libm.

use std::sync::LazyLock;

use super::round::{self, div_down, div_up, mul_down, mul_up, sqrt_down, sqrt_up};
use super::Interval;

/// Tight binary64 enclosure of ln 2.
pub const LN2_LO: f64 = f64::from_bits(0x3FE6_2E42_FEFA_39EF);
pub const LN2_HI: f64 = f64::from_bits(0x3FE6_2E42_FEFA_39F0);

/// Cody-Waite split: `ln 2 = LN2_HEAD + tail` where the head has 21 trailing
/// zero bits, so `k * LN2_HEAD` is exact for every reachable `k`.
const LN2_HEAD: f64 = f64::from_bits(0x3FE6_2E42_FEE0_0000);
const LN2_TAIL_LO: f64 = f64::from_bits(0x3DEA_39EF_3579_3C76);
const LN2_TAIL_HI: f64 = f64::from_bits(0x3DEA_39EF_3579_3C77);

const TAYLOR_DEGREE: usize = 20;

/// exp(x) > f64::MAX beyond this point.
const EXP_OVERFLOW: f64 = 709.79;
/// exp(x) < smallest subnormal below this point.
const EXP_UNDERFLOW: f64 = -745.2;

static INV_FACTORIAL: LazyLock<Vec<Interval>> = LazyLock::new(|| {
    let mut out = Vec::with_capacity(TAYLOR_DEGREE + 2);
    let mut cur = Interval::ONE;
    out.push(cur);
    for j in 1..=TAYLOR_DEGREE + 1 {
        let j = j as f64;
        cur = Interval::new(div_down(cur.lo(), j), div_up(cur.hi(), j));
        out.push(cur);
    }
    out
});

/// Lower and upper bounds of `exp(x)`.
pub fn exp_bounds(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (0.0, f64::INFINITY);
    }
    if x == 0.0 {
        return (1.0, 1.0);
    }
    if x == f64::NEG_INFINITY {
        return (0.0, 0.0);
    }
    if x > EXP_OVERFLOW {
        return (f64::MAX, f64::INFINITY);
    }
    if x < EXP_UNDERFLOW {
        return (0.0, f64::from_bits(1));
    }

    let k = (x / std::f64::consts::LN_2).round();
    let head = Interval::point(x) - Interval::point(k * LN2_HEAD);
    let r = head - Interval::new(LN2_TAIL_LO, LN2_TAIL_HI) * Interval::point(k);

    let coeffs = &*INV_FACTORIAL;
    let mut acc = coeffs[TAYLOR_DEGREE];
    for j in (0..TAYLOR_DEGREE).rev() {
        acc = acc * r + coeffs[j];
    }
    // |remainder| <= |r|^(n+1) / (n+1)! * e^|r|, and e^|r| < 2 here.
    let mag = r.mag();
    let mut pow = 1.0;
    for _ in 0..=TAYLOR_DEGREE {
        pow = mul_up(pow, mag);
    }
    let rem = mul_up(mul_up(pow, coeffs[TAYLOR_DEGREE + 1].hi()), 2.0);
    let lo = round::sub_down(acc.lo(), rem).max(0.0);
    let hi = round::add_up(acc.hi(), rem);

    let k = k as i32;
    (round::scale2_down(lo, k), round::scale2_up(hi, k))
}

/// Lower and upper bounds of `ln(x)` for `x > 0`.
pub fn ln_bounds(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    if x == 1.0 {
        return (0.0, 0.0);
    }
    if x == f64::INFINITY {
        return (f64::MAX, f64::INFINITY);
    }
    let guess = x.ln();
    let unit = guess.abs().max(f64::MIN_POSITIVE) * f64::EPSILON;

    let mut delta = unit;
    let mut lo = guess - delta;
    while exp_bounds(lo).1 > x {
        delta *= 2.0;
        lo = guess - delta;
    }
    let mut delta = unit;
    let mut hi = guess + delta;
    while exp_bounds(hi).0 < x {
        delta *= 2.0;
        hi = guess + delta;
    }
    (lo, hi)
}

/// Bounds of `x^n` for `x >= 0` and `n >= 0`, by binary powering.
pub fn powi_nonneg_bounds(x: f64, n: u64) -> (f64, f64) {
    debug_assert!(x >= 0.0);
    let (mut lo, mut hi) = (1.0, 1.0);
    let (mut base_lo, mut base_hi) = (x, x);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            lo = mul_down(lo, base_lo);
            hi = mul_up(hi, base_hi);
        }
        e >>= 1;
        if e > 0 {
            base_lo = mul_down(base_lo, base_lo);
            base_hi = mul_up(base_hi, base_hi);
        }
    }
    (lo, hi)
}

/// Bounds of `x^(num/den)` for `x >= 0`, `den > 0` and the fraction in
/// lowest terms. Negative powers of zero give `+inf`.
pub fn pow_rational_bounds(x: f64, num: i64, den: i64) -> (f64, f64) {
    debug_assert!(x >= 0.0 && den > 0);
    if num == 0 {
        return (1.0, 1.0);
    }
    let n_abs = num.unsigned_abs();
    let (lo, hi) = if x == 0.0 {
        (0.0, 0.0)
    } else if x == f64::INFINITY {
        (f64::INFINITY, f64::INFINITY)
    } else {
        match den {
            1 => powi_nonneg_bounds(x, n_abs),
            2 => {
                let (slo, _) = powi_nonneg_bounds(sqrt_down(x), n_abs);
                let (_, shi) = powi_nonneg_bounds(sqrt_up(x), n_abs);
                (slo, shi)
            }
            _ => {
                let (llo, lhi) = ln_bounds(x);
                let q = Interval::point(n_abs as f64) / Interval::point(den as f64);
                let t = Interval::new(llo, lhi) * q;
                (exp_bounds(t.lo()).0, exp_bounds(t.hi()).1)
            }
        }
    };
    if num > 0 {
        (lo, hi)
    } else {
        let inv_lo = if hi == 0.0 {
            f64::INFINITY
        } else {
            div_down(1.0, hi)
        };
        let inv_hi = if lo == 0.0 {
            f64::INFINITY
        } else {
            div_up(1.0, lo)
        };
        (inv_lo, inv_hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_constants_bracket_libm_value() {
        assert!(LN2_LO <= std::f64::consts::LN_2 && std::f64::consts::LN_2 <= LN2_HI);
        assert_eq!(LN2_LO.next_up(), LN2_HI);
        let split = Interval::point(LN2_HEAD) + Interval::new(LN2_TAIL_LO, LN2_TAIL_HI);
        assert!(split.lo() <= LN2_HI && split.hi() >= LN2_LO);
    }

    #[test]
    fn exp_bounds_are_tight() {
        for &x in &[-700.0, -3.5, -1e-9, 1e-300, 0.5, 1.0, 2.0, 88.0, 700.0] {
            let (lo, hi) = exp_bounds(x);
            let reference = x.exp();
            assert!(
                lo <= reference.next_up() && reference.next_down() <= hi,
                "{x}"
            );
            assert!(
                (hi - lo) <= 6.0 * f64::EPSILON * reference.abs(),
                "{x}: {lo} {hi}"
            );
        }
    }

    #[test]
    fn exp_saturates_outside_range() {
        assert_eq!(exp_bounds(1000.0), (f64::MAX, f64::INFINITY));
        assert_eq!(exp_bounds(-1000.0).0, 0.0);
    }

    #[test]
    fn ln_inverts_exp() {
        for &x in &[1e-300, 0.1, 0.5, 1.0 + 1e-15, 2.0, 1e10] {
            let (lo, hi) = ln_bounds(x);
            assert!(lo <= hi);
            assert!(exp_bounds(lo).1 <= x && x <= exp_bounds(hi).0);
        }
    }

    #[test]
    fn half_integer_powers_use_exact_sqrt() {
        assert_eq!(pow_rational_bounds(4.0, 1, 2), (2.0, 2.0));
        assert_eq!(pow_rational_bounds(4.0, 3, 2), (8.0, 8.0));
        assert_eq!(pow_rational_bounds(4.0, -1, 2), (0.5, 0.5));
        let (lo, hi) = pow_rational_bounds(0.0, -3, 2);
        assert_eq!((lo, hi), (f64::INFINITY, f64::INFINITY));
    }

    #[test]
    fn generic_rational_power() {
        let (lo, hi) = pow_rational_bounds(8.0, 1, 3);
        assert!(lo <= 2.0 && 2.0 <= hi);
        assert!(hi - lo < 1e-14);
    }
}
