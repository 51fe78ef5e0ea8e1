//! The specific radial functions behind the singularity argument.
//!
//! With `a = N/2 − 2` and `b = N/2 − 1`, the two denominators appearing in
//! the improved Hardy-Rellich weight are `r² − r^{N/2} = r²(1 − r^a)` and
//! `r² − (9/10) r^{N/2+1} = r²(1 − (9/10) r^b)`; both are positive on
//! `(0, 1)` for `N ≥ 5`.

use num_rational::BigRational;
use num_traits::Signed;

use super::{int, Dimension, ExprTree, LogPolynomial, RadialError};

pub fn nine_tenths() -> BigRational {
    BigRational::new(9.into(), 10.into())
}

fn half_n(n: Dimension) -> BigRational {
    n.rational() / int(2)
}

fn require_hr_dimension(n: Dimension) -> Result<(), RadialError> {
    if n.get() < 5 {
        return Err(RadialError::Domain(format!(
            "the Hardy-Rellich weights need N >= 5, got N = {n}"
        )));
    }
    Ok(())
}

fn require_positive_m(m: &BigRational) -> Result<(), RadialError> {
    if !m.is_positive() {
        return Err(RadialError::Domain(format!(
            "m must be positive, got {}",
            super::format_rational(m)
        )));
    }
    Ok(())
}

/// `w_m = −4 ln r − 4/m + (4/m) r^m`; satisfies `w_m(1) = w_m'(1) = 0`.
pub fn make_w(m: &BigRational) -> Result<LogPolynomial, RadialError> {
    require_positive_m(m)?;
    Ok(LogPolynomial::ln_r().scale(&int(-4)) + exponent_part(m)?)
}

/// `w_m + 4 ln r = (4/m)(r^m − 1)`, so that `r⁴ e^{w_m} = e^{this}`.
pub fn exponent_part(m: &BigRational) -> Result<LogPolynomial, RadialError> {
    require_positive_m(m)?;
    let c = int(4) / m;
    Ok(LogPolynomial::power(m.clone()).scale(&c) - LogPolynomial::constant(c))
}

/// `r⁴ Δ² w_m`, computed symbolically.
pub fn regularized_bilaplacian(
    n: Dimension,
    m: &BigRational,
) -> Result<LogPolynomial, RadialError> {
    Ok(make_w(m)?.bilaplacian(n).mul_power(&int(4)))
}

/// Closed form `8(N−2)(N−4) + 4(m+N−2)(m−2)(m+N−4) r^m` of
/// [`regularized_bilaplacian`].
pub fn regularized_bilaplacian_closed_form(n: Dimension, m: &BigRational) -> LogPolynomial {
    let nn = n.rational();
    let c0 = int(8) * (&nn - int(2)) * (&nn - int(4));
    let cm = int(4) * (m + &nn - int(2)) * (m - int(2)) * (m + &nn - int(4));
    LogPolynomial::constant(c0) + LogPolynomial::monomial(cm, m.clone(), 0)
}

/// `φ = r^{1−N/2} − 9/10`.
pub fn phi(n: Dimension) -> LogPolynomial {
    LogPolynomial::power(int(1) - half_n(n)) - LogPolynomial::constant(nine_tenths())
}

/// `ψ = r^{2−N/2} − 1`.
pub fn psi(n: Dimension) -> LogPolynomial {
    LogPolynomial::power(int(2) - half_n(n)) - LogPolynomial::constant(int(1))
}

/// `r² − (9/10) r^{N/2+1}`.
pub fn inner_denominator(n: Dimension) -> LogPolynomial {
    LogPolynomial::power(int(2)) - LogPolynomial::monomial(nine_tenths(), half_n(n) + int(1), 0)
}

/// `r² − r^{N/2}`.
pub fn outer_denominator(n: Dimension) -> LogPolynomial {
    LogPolynomial::power(int(2)) - LogPolynomial::power(half_n(n))
}

/// `1 − r^{N/2−2}`, the outer denominator divided by `r²`.
pub fn outer_factor(n: Dimension) -> LogPolynomial {
    LogPolynomial::constant(int(1)) - LogPolynomial::power(half_n(n) - int(2))
}

/// `1 − (9/10) r^{N/2−1}`, the inner denominator divided by `r²`.
pub fn inner_factor(n: Dimension) -> LogPolynomial {
    LogPolynomial::constant(int(1)) - LogPolynomial::monomial(nine_tenths(), half_n(n) - int(1), 0)
}

/// `(N−2)²(N−4)²/16`, the coefficient of the mixed-denominator term.
pub fn hr1_inner_coefficient(n: Dimension) -> BigRational {
    let nn = n.rational();
    let (a, b) = (&nn - int(2), &nn - int(4));
    &a * &a * &b * &b / int(16)
}

/// `(N−1)(N−4)²/4`, the coefficient of the outer-only term.
pub fn hr1_outer_coefficient(n: Dimension) -> BigRational {
    let nn = n.rational();
    let b = &nn - int(4);
    (&nn - int(1)) * &b * &b / int(4)
}

/// Weight of the improved inequality `∫(Δu)² ≥ ∫ W u²`:
/// `A / ((r² − 0.9 r^{N/2+1})(r² − r^{N/2})) + B / (r²(r² − r^{N/2}))`.
pub fn hr1_weight(n: Dimension) -> Result<ExprTree, RadialError> {
    require_hr_dimension(n)?;
    let inner = ExprTree::quotient(
        ExprTree::constant(hr1_inner_coefficient(n)),
        ExprTree::product(vec![
            inner_denominator(n).into(),
            outer_denominator(n).into(),
        ]),
    );
    let outer = ExprTree::quotient(
        ExprTree::constant(hr1_outer_coefficient(n)),
        ExprTree::product(vec![
            LogPolynomial::power(int(2)).into(),
            outer_denominator(n).into(),
        ]),
    );
    Ok(ExprTree::sum(vec![inner, outer]))
}

/// Weight of the classical-constant inequality: `H_N / (r²(r² − r^{N/2}))`.
pub fn hr2_weight(n: Dimension) -> Result<ExprTree, RadialError> {
    require_hr_dimension(n)?;
    Ok(ExprTree::quotient(
        ExprTree::constant(n.h_n()),
        ExprTree::product(vec![
            LogPolynomial::power(int(2)).into(),
            outer_denominator(n).into(),
        ]),
    ))
}

/// `r⁴` times the improved weight, in the form
/// `A / ((1 − r^a)(1 − 0.9 r^b)) + B / (1 − r^a)`; finite at `r = 0`.
pub fn hr1_weight_regularized(n: Dimension) -> Result<ExprTree, RadialError> {
    require_hr_dimension(n)?;
    let inner = ExprTree::quotient(
        ExprTree::constant(hr1_inner_coefficient(n)),
        ExprTree::product(vec![outer_factor(n).into(), inner_factor(n).into()]),
    );
    let outer = ExprTree::quotient(
        ExprTree::constant(hr1_outer_coefficient(n)),
        outer_factor(n).into(),
    );
    Ok(ExprTree::sum(vec![inner, outer]))
}

/// `(N−2)² + 4(N−1) − N²`, which is identically zero.
pub fn constant_split_defect(n: Dimension) -> BigRational {
    let nn = n.rational();
    let d = &nn - int(2);
    &d * &d + int(4) * (&nn - int(1)) - &nn * &nn
}

/// `−Δφ − ((N−2)²/4) r^{−N/2−1}`; zero when the identity holds.
pub fn phi_identity_defect(n: Dimension) -> LogPolynomial {
    let nn = n.rational();
    let c = (&nn - int(2)) * (&nn - int(2)) / int(4);
    let target = LogPolynomial::monomial(c, -half_n(n) - int(1), 0);
    -phi(n).laplacian(n) - target
}
