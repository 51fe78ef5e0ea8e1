use extremal_core::branch::{
    check_pointwise_monotone, continue_branch, integrate, shoot, ContinuationOptions,
    IntegrateOptions, ShootOptions, Termination,
};
use extremal_core::certifier::{default_m, lambda_prime_enclosure};
use extremal_core::radial::Dimension;
use extremal_core::SearchOptions;

#[test]
fn zero_parameter_reproduces_the_trivial_solution() {
    let s = integrate(13, 0.0, 0.0, 0.0, &IntegrateOptions::default()).unwrap();
    assert_eq!((s.u, s.u1, s.u2, s.u3), (0.0, 0.0, 0.0, 0.0));
    let p = shoot(13, 0.0, &ShootOptions::default()).unwrap();
    assert_eq!((p.u0, p.u2_0, p.sup_norm, p.residual), (0.0, 0.0, 0.0, 0.0));
    let b = continue_branch(
        13,
        &ContinuationOptions {
            u0_max: 0.1,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(b.points[0], p);
}

#[test]
fn branch_in_dimension_13_stays_below_certified_bound() {
    let b = continue_branch(13, &ContinuationOptions::default()).unwrap();
    let s = lambda_prime_enclosure(
        Dimension::new(13).unwrap(),
        &default_m(13),
        &SearchOptions::default(),
    )
    .unwrap();
    assert!(
        b.lambda_star < s.value.lo(),
        "{} vs {:?}",
        b.lambda_star,
        s.value
    );
    assert!(b.lambda_star <= 2525.0);
    assert!(b.u0_increasing());
    // No fold in this dimension: λ saturates while u0 grows.
    assert!(
        matches!(b.termination, Termination::Saturated { .. }),
        "{:?}",
        b.termination
    );
    assert!(b.fold.is_none());
    assert!(b.tail_growth.unwrap() < 1e-6);
    // The maximum of u is at the center.
    for p in &b.points {
        assert_eq!(p.sup_norm, p.u0, "{p:?}");
    }
}

#[test]
fn halving_the_tolerance_barely_moves_lambda_star() {
    let coarse = continue_branch(13, &ContinuationOptions::default()).unwrap();
    let mut opts = ContinuationOptions::default();
    opts.integrate = opts.integrate.with_rtol(opts.integrate.rtol / 2.0);
    let fine = continue_branch(13, &opts).unwrap();
    let rel = (coarse.lambda_star - fine.lambda_star).abs() / fine.lambda_star;
    assert!(rel < 1e-3, "{rel:e}");
}

#[test]
fn verified_points_survive_tighter_reintegration() {
    let b = continue_branch(20, &ContinuationOptions::default()).unwrap();
    assert!(b.verified > 20, "{:?}", b.summary());
    let tight = IntegrateOptions::default().with_rtol(1e-12);
    for p in b.verified_part() {
        let s = integrate(20, p.lambda, p.u0, p.u2_0, &tight).unwrap();
        assert!(s.boundary_defect() <= 1e-6, "{p:?}: {s:?}");
    }
}

#[test]
fn lower_branch_is_pointwise_increasing() {
    let b = continue_branch(13, &ContinuationOptions::default()).unwrap();
    let report = check_pointwise_monotone(&b, 100, 1e-7, &IntegrateOptions::default()).unwrap();
    assert!(report.pairs > 20);
    assert_eq!(report.violations, 0, "{report:?}");
}

#[test]
fn continuation_agrees_with_newton_shooting() {
    // Two independent routes to the same solution: a rescaled initial
    // value problem and Newton on the clamped boundary conditions.
    let b = continue_branch(13, &ContinuationOptions::default()).unwrap();
    let p = b
        .verified_part()
        .iter()
        .find(|p| p.lambda > 1500.0)
        .unwrap();
    let q = shoot(13, p.lambda, &ShootOptions::default()).unwrap();
    assert!((p.u0 - q.u0).abs() <= 1e-6 * p.u0, "{p:?} {q:?}");
    assert!(
        (p.u2_0 - q.u2_0).abs() <= 1e-6 * p.u2_0.abs(),
        "{p:?} {q:?}"
    );
}

#[test]
fn closed_form_dimension_respects_its_bound() {
    let b = continue_branch(32, &ContinuationOptions::default()).unwrap();
    let bound = 8.0 * 30.0 * 28.0 * 2f64.exp();
    assert!(b.lambda_star < bound, "{} vs {bound}", b.lambda_star);
}

#[test]
fn csv_and_summary_are_reproducible() {
    let opts = ContinuationOptions {
        u0_max: 5.0,
        ..Default::default()
    };
    let run = || {
        let b = continue_branch(31, &opts).unwrap();
        let mut csv = Vec::new();
        b.write_csv(&mut csv).unwrap();
        (csv, serde_json::to_string(&b.summary()).unwrap())
    };
    assert_eq!(run(), run());
}
