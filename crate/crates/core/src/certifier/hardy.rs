//! Certificates for the improved Hardy-Rellich inequality and the classical
//! threshold.
//!
//! Notation: `d1 = r² − 0.9 r^{N/2+1}`, `d2 = r² − r^{N/2}`, `V = 1/d1`,
//! `ψ = r^{2−N/2} − 1` and `W₁/V = (N−4)²/(4 d2)`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::conditions::lambda_prime_enclosure;
use super::sign::{certify_sign, Certificate, Sense};
use super::CertifierError;
use crate::interval::{BoundEnclosure, Interval, SearchOptions};
use crate::radial::named::{
    constant_split_defect, hr1_inner_coefficient, hr1_outer_coefficient, inner_denominator,
    inner_factor, nine_tenths, outer_denominator, phi_identity_defect, psi,
};
use crate::radial::{format_rational, int, Centered, Dimension, LogPolynomial};

/// Interior domain used where the residual vanishes at both endpoints.
pub const BESSEL_DOMAIN: (f64, f64) = (1e-8, 1.0 - 1e-8);
/// Domain of the pointwise weight comparison.
pub const DOMINATION_DOMAIN: (f64, f64) = (1e-6, 1.0 - 1e-6);

fn require(n: Dimension) -> Result<(), CertifierError> {
    if n.get() < 5 {
        return Err(CertifierError::UnsupportedDimension {
            n: n.get(),
            reason: "N >= 5 is required".into(),
        });
    }
    Ok(())
}

fn half_n(n: Dimension) -> BigRational {
    n.rational() / int(2)
}

/// `r·d1·d2` times the ODE residual `ψ″ + ((N−1)/r + V′/V)ψ′ + (W₁/V)ψ`.
///
/// With `V′/V = −d1′/d1` the product is the log-polynomial
/// `r d1 d2 ψ″ + ((N−1) d1 d2 − r d1′ d2) ψ′ + ((N−4)²/4) r d1 ψ`, and
/// `r d1 d2 > 0` on `(0, 1)`.
pub fn bessel_residual(n: Dimension) -> LogPolynomial {
    let r = LogPolynomial::power(int(1));
    let (d1, d2) = (inner_denominator(n), outer_denominator(n));
    let p = psi(n);
    let (p1, p2) = (p.derivative(), p.derivative().derivative());
    let nn = n.rational();
    let w = (&nn - int(4)) * (&nn - int(4)) / int(4);
    let d12 = &d1 * &d2;
    let first = &(&r * &d12) * &p2;
    let drift = d12.scale(&(&nn - int(1))) - &(&r * &d1.derivative()) * &d2;
    let second = &drift * &p1;
    let third = (&(&r * &d1) * &p).scale(&w);
    first + second + third
}

/// `ψ` is a positive super-solution of the weighted radial ODE.
///
/// Positivity is certified as `r^{N/2−2} ψ = 1 − r^{N/2−2} > 0`.
pub fn check_bessel_supersolution(
    n: Dimension,
    opts: &SearchOptions,
) -> Result<Certificate, CertifierError> {
    require(n)?;
    let domain = Interval::new(BESSEL_DOMAIN.0, BESSEL_DOMAIN.1);
    let scaled_psi = psi(n).mul_power(&(half_n(n) - int(2)));
    let positive = certify_sign(
        format!("r^(N/2-2) ψ > 0 for N = {n}"),
        &Centered::new(&scaled_psi.into()),
        domain,
        Sense::Positive,
        opts,
    );
    let residual = bessel_residual(n);
    let supersolution = certify_sign(
        format!("r d1 d2 [ψ'' + ((N-1)/r + V'/V) ψ' + (W1/V) ψ] <= 0 for N = {n}"),
        &Centered::new(&residual.into()),
        domain,
        Sense::NonPositive,
        opts,
    );
    Ok(Certificate::all_of(
        format!("ψ is a positive super-solution for N = {n}"),
        vec![positive, supersolution],
    ))
}

/// `−d1′ − (−2r(1 − 0.9 r^{N/2−1}) + 0.45(N−2) r^{N/2})`: the stated form
/// of `V′/V` multiplied by `d1`. Zero when the identity holds.
pub fn vr_identity_defect(n: Dimension) -> LogPolynomial {
    let r = LogPolynomial::power(int(1));
    let stated = (&r * &inner_factor(n)).scale(&int(-2))
        + LogPolynomial::monomial(
            nine_tenths() * (n.rational() - int(2)) / int(2),
            half_n(n),
            0,
        );
    -inner_denominator(n).derivative() - stated
}

/// Limit of the added term `0.45(N−2) r^{N/2−2}/(1 − 0.9 r^{N/2−1})` as
/// `r → 1`, which is `4.5(N−2)`.
pub fn vr_added_term_limit(n: Dimension) -> BigRational {
    nine_tenths() * (n.rational() - int(2)) / int(2) / (int(1) - nine_tenths())
}

/// `V′/V ≥ −2/r`: the identity for `V′/V` holds exactly and
/// `1 − 0.9 r^{N/2−1} > 0` on `[0, 1]`, so the added term is nonnegative.
pub fn check_vr_over_v(n: Dimension, opts: &SearchOptions) -> Result<Certificate, CertifierError> {
    require(n)?;
    let defect = vr_identity_defect(n);
    let identity = Certificate::exact(
        format!("V'/V = -2/r + 0.45(N-2) r^(N/2-2)/(1 - 0.9 r^(N/2-1)) for N = {n}"),
        Interval::new(0.0, 1.0),
        defect.is_zero(),
        Some((0.5, defect.enclose(Interval::point(0.5)))),
    );
    let factor = inner_factor(n);
    let positive = certify_sign(
        format!("1 - 0.9 r^(N/2-1) > 0 for N = {n}"),
        &Centered::new(&factor.into()),
        Interval::new(0.0, 1.0),
        Sense::Positive,
        opts,
    );
    Ok(Certificate::all_of(
        format!("V'/V >= -2/r for N = {n}"),
        vec![identity, positive],
    ))
}

/// `r² d1 d2 (W_HR1 − W_HR2) = A r² + (B − H_N) d1 ≥ 0`.
pub fn hr_difference_cleared(n: Dimension) -> LogPolynomial {
    let a = hr1_inner_coefficient(n);
    let b = hr1_outer_coefficient(n);
    LogPolynomial::power(int(2)).scale(&a) + inner_denominator(n).scale(&(b - n.h_n()))
}

/// The improved weight dominates the classical one pointwise.
pub fn check_hr_domination(
    n: Dimension,
    opts: &SearchOptions,
) -> Result<Certificate, CertifierError> {
    require(n)?;
    let split = constant_split_defect(n);
    let exact = Certificate::exact(
        format!("(N-2)^2 + 4(N-1) = N^2 for N = {n}"),
        Interval::new(0.0, 1.0),
        split == int(0),
        None,
    );
    let diff = hr_difference_cleared(n);
    let sign = certify_sign(
        format!("r^2 d1 d2 (W_HR1 - W_HR2) >= 0 for N = {n}"),
        &Centered::new(&diff.into()),
        Interval::new(DOMINATION_DOMAIN.0, DOMINATION_DOMAIN.1),
        Sense::NonNegative,
        opts,
    );
    Ok(Certificate::all_of(
        format!("W_HR1 >= W_HR2 for N = {n}"),
        vec![exact, sign],
    ))
}

/// `−Δφ = ((N−2)²/4) r^{−N/2−1}` by exact cancellation.
pub fn check_phi_identity(n: Dimension) -> Result<Certificate, CertifierError> {
    require(n)?;
    let defect = phi_identity_defect(n);
    Ok(Certificate::exact(
        format!("-Δφ = ((N-2)^2/4) r^(-N/2-1) for N = {n}"),
        Interval::new(0.0, 1.0),
        defect.is_zero(),
        Some((0.5, defect.enclose(Interval::point(0.5)))),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub n: u32,
    pub h_n: Interval,
    pub s_n: BoundEnclosure,
    /// `Some(true)` when `H_N > S_N` is certified, `Some(false)` when
    /// `H_N < S_N` is, `None` when the enclosure straddles `H_N`.
    pub classical_suffices: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub m: String,
    /// Least scanned `N` with `H_N > S_N`, if every smaller one was decided.
    pub threshold: Option<u32>,
    pub rows: Vec<ThresholdRow>,
}

/// Least `N` in `13..=40` for which the classical constant `H_N` exceeds
/// the sharp `S_N`, i.e. where the classical inequality alone suffices.
pub fn classical_hr_threshold(
    m: &BigRational,
    opts: &SearchOptions,
) -> Result<ThresholdScan, CertifierError> {
    let mut rows = Vec::new();
    let mut threshold = None;
    for n in 13..=40u32 {
        let dim = Dimension::new(n)?;
        let s_n = lambda_prime_enclosure(dim, m, opts)?;
        let h_n = Interval::from_rational(&dim.h_n());
        let classical_suffices = if h_n.lo() > s_n.value.hi() {
            Some(true)
        } else if h_n.hi() < s_n.value.lo() {
            Some(false)
        } else {
            None
        };
        rows.push(ThresholdRow {
            n,
            h_n,
            s_n,
            classical_suffices,
        });
        match classical_suffices {
            Some(true) => {
                threshold = Some(n);
                break;
            }
            Some(false) => {}
            None => break,
        }
    }
    Ok(ThresholdScan {
        m: format_rational(m),
        threshold,
        rows,
    })
}
