//! The two hypotheses on the test function `w_m` and their sharp constants.
//!
//! Write `P = r⁴Δ²w_m` and `Q = w_m + 4 ln r = (4/m)(r^m − 1)`, so that
//! `r⁴e^{w_m} = e^Q`. Both are continuous on `[0, 1]`.
//!
//! * Super-solution: `P − λ′e^Q ≤ 0` on `[0, 1]`. The least admissible
//!   `λ′` is `S_N = sup P e^{−Q}`.
//! * Stability: with `D1 = 1 − r^a`, `D2 = 1 − 0.9 r^b` (`a = N/2 − 2`,
//!   `b = N/2 − 1`), the regularized weight is `W = A/(D1 D2) + B/D1`
//!   and the claim `W ≥ βe^Q` on `(0, 1)` is cleared to
//!   `A + B D2 − βe^Q D1 D2 ≥ 0`. Near `r = 1` the weight blows up, so
//!   `[0, 1 − δ]` is certified by bisection and `[1 − δ, 1)` by
//!   monotonicity: `D1`, `D2` decrease and `Q ≤ 0` there, hence
//!   `W(r) ≥ W(1 − δ) ≥ β ≥ βe^Q`. The largest admissible `β` is
//!   `I_N = inf W e^{−Q}`.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};

use super::sign::{certify_sign, Certificate, Sense};
use super::{CertifierError, Threshold};
use crate::interval::{
    certified_inf, certified_sup, BoundEnclosure, Enclose, Interval, SearchOptions, SearchStatus,
};
use crate::radial::named::{
    exponent_part, hr1_inner_coefficient, hr1_outer_coefficient, hr1_weight_regularized,
    inner_factor, outer_factor, regularized_bilaplacian,
};
use crate::radial::{format_rational, int, Centered, Dimension, ExprTree, LogPolynomial};

/// Width of the boundary layer handled by monotonicity.
pub const TAIL_DELTA: f64 = 1e-4;

/// Binary64 enclosure of `e²`, one ulp wide.
pub const E2_LO: f64 = f64::from_bits(0x401D_8E64_B8D4_DDAD);
pub const E2_HI: f64 = f64::from_bits(0x401D_8E64_B8D4_DDAE);

fn require(n: Dimension, m: &BigRational) -> Result<(), CertifierError> {
    if n.get() < 5 {
        return Err(CertifierError::UnsupportedDimension {
            n: n.get(),
            reason: "N >= 5 is required".into(),
        });
    }
    if !m.is_positive() {
        return Err(CertifierError::InvalidParameter(format!(
            "m must be positive, got {}",
            format_rational(m)
        )));
    }
    Ok(())
}

fn require_threshold(t: &Threshold, name: &str) -> Result<(), CertifierError> {
    if !t.is_positive() {
        return Err(CertifierError::InvalidParameter(format!(
            "{name} must be positive, got {t}"
        )));
    }
    Ok(())
}

/// `P = r⁴Δ²w_m`, which carries no logarithmic terms.
fn regularized_operator(n: Dimension, m: &BigRational) -> Result<LogPolynomial, CertifierError> {
    let p = regularized_bilaplacian(n, m)?;
    debug_assert!(!p.has_log_terms());
    Ok(p)
}

/// `coeff · e^{Q + shift}`, with the shift folded into the exponent.
fn scaled_exponential(q: &LogPolynomial, t: &Threshold) -> ExprTree {
    let arg = q + &LogPolynomial::constant(t.exp_shift.clone());
    ExprTree::product(vec![
        ExprTree::constant(t.coeff.clone()),
        ExprTree::exp(arg.into()),
    ])
}

/// Certifies `P − λ′e^Q ≤ 0` on `[0, 1]`.
pub fn check_cond1(
    n: Dimension,
    m: &BigRational,
    lambda_prime: &Threshold,
    opts: &SearchOptions,
) -> Result<Certificate, CertifierError> {
    require(n, m)?;
    require_threshold(lambda_prime, "lambda_prime")?;
    let p = regularized_operator(n, m)?;
    let q = exponent_part(m)?;
    let residual = ExprTree::difference(p.into(), scaled_exponential(&q, lambda_prime));
    let claim = format!(
        "r^4 (Δ²w_m − λ′ e^(w_m)) <= 0 on [0, 1] for N = {n}, m = {}, λ′ = {lambda_prime}",
        format_rational(m)
    );
    Ok(certify_sign(
        claim,
        &Centered::new(&residual),
        Interval::new(0.0, 1.0),
        Sense::NonPositive,
        opts,
    ))
}

/// Certifies the stability weight domination `W ≥ βe^Q` on `(0, 1)`.
pub fn check_cond2(
    n: Dimension,
    m: &BigRational,
    beta: &Threshold,
    opts: &SearchOptions,
) -> Result<Certificate, CertifierError> {
    require(n, m)?;
    require_threshold(beta, "beta")?;
    let q = exponent_part(m)?;
    let (d1, d2) = (outer_factor(n), inner_factor(n));
    let a = hr1_inner_coefficient(n);
    let b = hr1_outer_coefficient(n);
    let head = LogPolynomial::constant(a) + d2.scale(&b);
    let residual = ExprTree::difference(
        head.into(),
        ExprTree::product(vec![scaled_exponential(&q, beta), (&d1 * &d2).into()]),
    );
    let cut = 1.0 - TAIL_DELTA;
    let label = format!("N = {n}, m = {}, β = {beta}", format_rational(m));
    let main = certify_sign(
        format!("A + B·D2 − β e^Q D1·D2 >= 0 on [0, 1 − δ] for {label}"),
        &Centered::new(&residual),
        Interval::new(0.0, cut),
        Sense::NonNegative,
        opts,
    );

    let tail_box = Interval::new(cut, 1.0);
    let weight = hr1_weight_regularized(n)?.compile();
    let at_cut = weight.enclose(Interval::point(cut));
    let beta_hi = beta.enclosure().hi();
    let tail_value = Certificate::exact(
        format!("W(1 − δ) >= β for {label}"),
        Interval::point(cut),
        at_cut.lo() >= beta_hi,
        Some((cut, at_cut - beta.enclosure())),
    );
    // An unsettled tail value is inconclusive: the main part already covers
    // the point 1 − δ itself.
    let tail_value = if tail_value.is_certified() {
        tail_value
    } else {
        Certificate {
            status: super::CertStatus::Inconclusive { unresolved: 1 },
            ..tail_value
        }
    };
    let falling = |p: &LogPolynomial, name: &str| {
        certify_sign(
            format!("{name}' <= 0 on [1 − δ, 1]"),
            &p.derivative().compile(),
            tail_box,
            Sense::NonPositive,
            opts,
        )
    };
    // Q = (4/m)(r^m − 1) in factored form, so that Q(1) = 0 exactly.
    let q_factored = ExprTree::product(vec![
        ExprTree::constant(int(4) / m),
        (LogPolynomial::power(m.clone()) - LogPolynomial::constant(int(1))).into(),
    ]);
    let q_nonpositive = certify_sign(
        "Q <= 0 on [1 − δ, 1]",
        &q_factored.compile(),
        tail_box,
        Sense::NonPositive,
        opts,
    );
    let tail = Certificate::all_of(
        format!("W >= β e^Q on [1 − δ, 1) by monotonicity for {label}"),
        vec![
            tail_value,
            falling(&d1, "D1"),
            falling(&d2, "D2"),
            q_nonpositive,
        ],
    );
    Ok(Certificate::all_of(
        format!("r^4 W_HR1 >= β r^4 e^(w_m) on (0, 1) for {label}"),
        vec![main, tail],
    ))
}

/// `P e^{−Q}`, the ratio whose supremum is the sharp `λ′`.
fn cond1_ratio(n: Dimension, m: &BigRational) -> Result<ExprTree, CertifierError> {
    let p = regularized_operator(n, m)?;
    let q = exponent_part(m)?;
    Ok(ExprTree::product(vec![
        p.into(),
        ExprTree::exp((-q).into()),
    ]))
}

/// `W e^{−Q}`, the ratio whose infimum is the sharp `β`.
fn cond2_ratio(n: Dimension, m: &BigRational) -> Result<ExprTree, CertifierError> {
    let q = exponent_part(m)?;
    Ok(ExprTree::product(vec![
        hr1_weight_regularized(n)?,
        ExprTree::exp((-q).into()),
    ]))
}

/// Encloses `S_N = sup_{[0,1]} P e^{−Q}`; every `λ′ ≥ S_N.hi` is admissible.
pub fn lambda_prime_enclosure(
    n: Dimension,
    m: &BigRational,
    opts: &SearchOptions,
) -> Result<BoundEnclosure, CertifierError> {
    require(n, m)?;
    let f = Centered::new(&cond1_ratio(n, m)?);
    Ok(certified_sup(&f, Interval::new(0.0, 1.0), opts))
}

/// Encloses `I_N = inf_{[0,1)} W e^{−Q}`; every `β ≤ I_N.lo` is
/// admissible.
///
/// The search runs on `[0, 1 − δ]`. On the tail the ratio is at least
/// `W(1 − δ)`, which is folded into the lower bound when it is not already
/// above the search result.
pub fn beta_enclosure(
    n: Dimension,
    m: &BigRational,
    opts: &SearchOptions,
) -> Result<BoundEnclosure, CertifierError> {
    require(n, m)?;
    let cut = 1.0 - TAIL_DELTA;
    let f = Centered::new(&cond2_ratio(n, m)?);
    let mut out = certified_inf(&f, Interval::new(0.0, cut), opts);
    let tail_lo = hr1_weight_regularized(n)?
        .compile()
        .enclose(Interval::point(cut))
        .lo();
    if tail_lo < out.value.lo() {
        out.value = Interval::new(tail_lo.min(out.value.hi()), out.value.hi());
        out.argmax_box = out.argmax_box.hull(Interval::new(cut, 1.0));
        if out.value.width() > opts.abs_tol(out.value.hi()) {
            out.status = SearchStatus::Inconclusive;
        }
    }
    Ok(out)
}

/// `λ′_N = 8(N−2)(N−4)e²`, exact.
pub fn closed_form_lambda(n: Dimension) -> Threshold {
    let nn = n.rational();
    Threshold::scaled_exp(int(8) * (&nn - int(2)) * (&nn - int(4)), int(2))
}

/// Decides `8(N−2)(N−4)e² < N²(N−4)²/16` with exact rationals and the
/// stored enclosure of `e²`. For `N > 4` this is `128(N−2)e² < N²(N−4)`.
pub fn closed_form_check(n: Dimension) -> bool {
    let nn = n.rational();
    let c = int(8) * (&nn - int(2)) * (&nn - int(4));
    let h = n.h_n();
    if !c.is_positive() {
        // Left side is at most zero and the right side is a square.
        return c.is_negative() || h.is_positive();
    }
    let e2_hi = BigRational::from_f64(E2_HI).expect("finite");
    let e2_lo = BigRational::from_f64(E2_LO).expect("finite");
    if &c * e2_hi < h {
        true
    } else {
        // Both sides are rational multiples with e² irrational, so they are
        // never equal; the one-ulp enclosure separates every N reached here.
        debug_assert!(c * e2_lo > h, "e² enclosure too wide to decide N = {n}");
        false
    }
}
