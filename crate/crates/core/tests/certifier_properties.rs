use extremal_core::certifier::{
    beta_enclosure, certify_dimension, check_cond1, check_cond2, closed_form_check, default_m,
    lambda_prime_enclosure, published, CertStatus, CertifyConfig, Outcome, Threshold, Verdict,
};
use extremal_core::radial::Dimension;
use extremal_core::SearchOptions;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

#[test]
fn sharp_constants_couple_with_certificates() {
    let opts = SearchOptions::with_tol(1e-6);
    for n in [13u32, 20, 31] {
        let m = default_m(n);
        let s = lambda_prime_enclosure(dim(n), &m, &opts).unwrap();
        let i = beta_enclosure(dim(n), &m, &opts).unwrap();
        assert!(s.converged() && i.converged(), "N = {n}");

        let above = Threshold::from_f64(s.value.hi() + 1.0).unwrap();
        let below = Threshold::from_f64(s.value.lo() - 1.0).unwrap();
        assert!(
            check_cond1(dim(n), &m, &above, &opts)
                .unwrap()
                .is_certified(),
            "N = {n}"
        );
        assert!(
            check_cond1(dim(n), &m, &below, &opts)
                .unwrap()
                .is_falsified(),
            "N = {n}"
        );

        let under = Threshold::from_f64(i.value.lo() - 1.0).unwrap();
        let over = Threshold::from_f64(i.value.hi() + 1.0).unwrap();
        assert!(
            check_cond2(dim(n), &m, &under, &opts)
                .unwrap()
                .is_certified(),
            "N = {n}"
        );
        assert!(
            check_cond2(dim(n), &m, &over, &opts)
                .unwrap()
                .is_falsified(),
            "N = {n}"
        );
    }
}

#[test]
fn small_lambda_prime_is_falsified_with_a_witness() {
    let cfg = CertifyConfig {
        lambda_prime: Some(Threshold::integer(100)),
        ..Default::default()
    };
    let report = certify_dimension(13, &cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Failed);
    assert_eq!(report.outcome(), Outcome::Falsified);
    match report.cond1.status {
        CertStatus::Falsified { witness, residual } => {
            assert!((0.0..=1.0).contains(&witness));
            assert!(residual.is_positive());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn published_rows_are_reproduced() {
    let cfg = CertifyConfig {
        opts: SearchOptions::with_tol(1e-4),
        ..Default::default()
    };
    for n in 13..=31u32 {
        let r = certify_dimension(n, &cfg).unwrap();
        let (l, b) = published(n).unwrap();
        assert_eq!(r.verdict, Verdict::SingularCertified, "N = {n}");
        assert!(
            r.s_n.value.hi() <= l && b <= r.i_n.value.lo(),
            "N = {n}: {:?} {:?}",
            r.s_n.value,
            r.i_n.value
        );
        assert!(r.s_n.value.hi() < r.i_n.value.lo());
        assert_eq!(r.agrees_with_published(), Some(true));
    }
}

#[test]
fn closed_form_regime_starts_at_32() {
    for n in 5..=31u32 {
        assert!(!closed_form_check(dim(n)), "N = {n}");
    }
    for n in 32..=200u32 {
        assert!(closed_form_check(dim(n)), "N = {n}");
    }
}

#[test]
fn closed_form_dimensions_certify_with_hardy_rellich_constant() {
    for n in [32u32, 40, 60] {
        let r = certify_dimension(n, &CertifyConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::SingularCertified, "N = {n}");
        let cf = r.closed_form.as_ref().unwrap();
        assert!(cf.holds);
        assert_eq!(r.lambda_prime, cf.lambda_prime);
        // λ′ = 8(N−2)(N−4)e² is the sharp supremum for m = 2.
        assert!(
            !r.s_n
                .value
                .intersect(cf.lambda_prime.enclosure())
                .is_empty(),
            "N = {n}"
        );
    }
}

#[test]
fn reports_round_trip_through_json() {
    let r = certify_dimension(17, &CertifyConfig::default()).unwrap();
    let json = serde_json::to_string_pretty(&r).unwrap();
    // Timings are not serialized, so compare the JSON forms.
    let back: extremal_core::certifier::DimensionReport = serde_json::from_str(&json).unwrap();
    assert_eq!(serde_json::to_string_pretty(&back).unwrap(), json);
}

#[test]
fn low_dimensions_are_rejected() {
    assert!(certify_dimension(12, &CertifyConfig::default()).is_err());
}
