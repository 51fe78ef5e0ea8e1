//! Directed rounding of the basic floating-point operations.
//!
//! The hardware rounds to nearest. Each operation below recovers the exact
//! rounding error with an error-free transformation (TwoSum, or a fused
//! multiply-add residual) and steps one ulp in the requested direction only
//! when the rounded result lies on the wrong side of the exact value. Exact
//! results therefore stay exact, and no rounding-mode control is needed.
//!
//! The residual trick stops being exact once the intermediate values
//! approach the subnormal range; there we fall back to an unconditional
//! one-ulp step, which is still a valid (if slightly wider) bound.

/// Below this magnitude an FMA residual may itself be rounded.
const TINY: f64 = 1.0e-290;

#[inline]
fn overflowed(result: f64, a: f64, b: f64) -> bool {
    result.is_infinite() && a.is_finite() && b.is_finite()
}

#[inline]
fn step_up(x: f64) -> f64 {
    x.next_up()
}

#[inline]
fn step_down(x: f64) -> f64 {
    x.next_down()
}

/// Exact error of `a + b = s` (Knuth's TwoSum).
#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        return s;
    }
    if overflowed(s, a, b) {
        return if s > 0.0 { f64::MAX } else { s };
    }
    if !s.is_finite() {
        return s;
    }
    let e = two_sum_err(a, b, s);
    if e < 0.0 {
        step_down(s)
    } else {
        s
    }
}

pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        return s;
    }
    if overflowed(s, a, b) {
        return if s < 0.0 { f64::MIN } else { s };
    }
    if !s.is_finite() {
        return s;
    }
    let e = two_sum_err(a, b, s);
    if e > 0.0 {
        step_up(s)
    } else {
        s
    }
}

pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Product with the IEEE 1788 convention `0 * inf = 0`.
#[inline]
fn raw_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = raw_mul(a, b);
    if p.is_nan() || a == 0.0 || b == 0.0 {
        return p;
    }
    if overflowed(p, a, b) {
        return if p > 0.0 { f64::MAX } else { p };
    }
    if !p.is_finite() {
        return p;
    }
    if p.abs() < TINY {
        // Includes underflow to zero: the exact product is nonzero here.
        let negative = (a < 0.0) != (b < 0.0);
        return if p == 0.0 {
            if negative {
                -f64::from_bits(1)
            } else {
                0.0
            }
        } else {
            step_down(p)
        };
    }
    let e = a.mul_add(b, -p);
    if e < 0.0 {
        step_down(p)
    } else {
        p
    }
}

pub fn mul_up(a: f64, b: f64) -> f64 {
    -mul_down(-a, b)
}

pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    // 0 / b and finite / inf are exact zeros.
    if q.is_nan() || a == 0.0 || (b.is_infinite() && a.is_finite()) {
        return q;
    }
    if overflowed(q, a, b) && b != 0.0 {
        return if q > 0.0 { f64::MAX } else { q };
    }
    if !q.is_finite() {
        return q;
    }
    if q.abs() < TINY || a.abs() < TINY {
        let negative = (a < 0.0) != (b < 0.0);
        return if q == 0.0 {
            if negative {
                -f64::from_bits(1)
            } else {
                0.0
            }
        } else {
            step_down(q)
        };
    }
    // a - q*b is exact; its sign (times sign of b) tells where a/b lies.
    let r = (-q).mul_add(b, a);
    let above = if b > 0.0 { r > 0.0 } else { r < 0.0 };
    let below = if b > 0.0 { r < 0.0 } else { r > 0.0 };
    debug_assert!(!(above && below));
    if below {
        step_down(q)
    } else {
        q
    }
}

pub fn div_up(a: f64, b: f64) -> f64 {
    -div_down(-a, b)
}

pub fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if !s.is_finite() || x == 0.0 {
        return s;
    }
    if x < TINY {
        return step_down(s).max(0.0);
    }
    let r = (-s).mul_add(s, x);
    if r < 0.0 {
        step_down(s)
    } else {
        s
    }
}

pub fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if !s.is_finite() || x == 0.0 {
        return s;
    }
    if x < TINY {
        return step_up(s);
    }
    let r = (-s).mul_add(s, x);
    if r > 0.0 {
        step_up(s)
    } else {
        s
    }
}

/// Multiplication by an exact power of two, rounded in the given direction
/// when the result leaves the normal range.
pub fn scale2_down(x: f64, k: i32) -> f64 {
    scale2(x, k, false)
}

pub fn scale2_up(x: f64, k: i32) -> f64 {
    scale2(x, k, true)
}

fn scale2(x: f64, k: i32, up: bool) -> f64 {
    let pow2 = |e: i32| f64::from_bits(((1023 + e) as u64) << 52);
    if x == 0.0 || !x.is_finite() || k == 0 {
        return x;
    }
    // Scaling a normal number by a power of two is exact while the result
    // stays normal.
    if (-1022..=1023).contains(&k) {
        let y = x * pow2(k);
        if y.is_finite() && y.abs() >= f64::MIN_POSITIVE {
            return y;
        }
    }
    let mut x = x;
    let mut k = k;
    while k != 0 {
        let step = k.clamp(-1000, 1000);
        x = if up {
            mul_up(x, pow2(step))
        } else {
            mul_down(x, pow2(step))
        };
        k -= step;
    }
    x
}
