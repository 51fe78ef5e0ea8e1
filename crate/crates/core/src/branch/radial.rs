//! The radial initial value problem for `Δ²u = λeᵘ` and its sensitivities.
//!
//! In `r` the equation reads
//! `u⁗ + 2(N−1)/r·u‴ + (N−1)(N−3)/r²·u″ − (N−1)(N−3)/r³·u′ = λeᵘ`.
//! It is integrated in `t = ln r` with `D = d/dt = r d/dr`, where the
//! radial bilaplacian factors as `r⁻⁴ D(D+N−2)(D−2)(D+N−4)`:
//! `D⁴u + (2N−8)D³u + (N²−10N+20)D²u − 2(N−2)(N−4)Du = λe^{u+4t}`.
//! The linear part has constant coefficients, so the step size is bounded
//! below uniformly in `r`. Integration starts at a small radius from the
//! regular series `u = u0 + c₂r² + c₄r⁴` with `c₂ = u2_0/2`,
//! `c₄ = λe^{u0}/(8N(N+2))`.

use serde::{Deserialize, Serialize};

use super::ode::{self, Failure, Stats, Tolerance};
use super::BranchError;

/// `(u, u′, u″, u‴)` at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub r: f64,
    pub u: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl RadialState {
    /// From `(u, Du, D²u, D³u)` at `t = ln r`.
    fn from_log(t: f64, y: &[f64]) -> RadialState {
        let r = t.exp();
        let (d1, d2, d3) = (y[1], y[2], y[3]);
        RadialState {
            r,
            u: y[0],
            u1: d1 / r,
            u2: (d2 - d1) / (r * r),
            u3: (d3 - 3.0 * d2 + 2.0 * d1) / (r * r * r),
        }
    }

    /// `max(|u(1)|, |u′(1)|)` when taken at `r = 1`.
    pub fn boundary_defect(&self) -> f64 {
        self.u.abs().max(self.u1.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateOptions {
    /// Largest starting radius for the series.
    pub eps: f64,
    /// Per-step relative local error bound.
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            eps: 1e-6,
            rtol: 1e-10,
            atol: 1e-300,
            max_steps: 200_000,
        }
    }
}

impl IntegrateOptions {
    pub fn with_rtol(self, rtol: f64) -> Self {
        IntegrateOptions { rtol, ..self }
    }

    /// `u` and the `D`-derivatives are controlled as two groups: the
    /// derivatives all scale like `r²` near the origin and one of them may
    /// cross zero.
    fn tolerance(&self) -> Tolerance {
        Tolerance {
            rtol: self.rtol,
            atol: self.atol,
            groups: &[(0, 1), (1, 4)],
            max_steps: self.max_steps,
        }
    }
}

/// Parameters of one shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Shot {
    pub n: u32,
    pub lambda: f64,
    pub u0: f64,
    pub u2_0: f64,
}

impl Shot {
    fn k(&self) -> f64 {
        let n = f64::from(self.n);
        8.0 * n * (n + 2.0)
    }

    fn coefficients(&self) -> (f64, f64) {
        (self.u2_0 / 2.0, self.lambda * self.u0.exp() / self.k())
    }

    /// The series start radius: `eps`, shrunk so that `c₄r⁴ ≤ 1e−8` when the
    /// core of the solution is narrower than `eps`.
    pub fn start_radius(&self, opts: &IntegrateOptions) -> f64 {
        let (_, c4) = self.coefficients();
        if c4 > 0.0 {
            opts.eps.min((1e-8 / c4).powf(0.25))
        } else {
            opts.eps
        }
    }

    /// `(u, Du, D²u, D³u)` from the series at radius `r`.
    fn series(&self, r: f64) -> [f64; 4] {
        let (c2, c4) = self.coefficients();
        let (a, b) = (c2 * r * r, c4 * r * r * r * r);
        [
            self.u0 + a + b,
            2.0 * a + 4.0 * b,
            4.0 * a + 16.0 * b,
            8.0 * a + 64.0 * b,
        ]
    }

    /// Series state followed by its derivatives with respect to `λ`, `u0`
    /// and `u2_0`, each a block of four.
    fn series_with_sensitivity(&self, r: f64) -> [f64; 16] {
        let mut y = [0.0; 16];
        y[..4].copy_from_slice(&self.series(r));
        let (_, c4) = self.coefficients();
        let r2 = r * r;
        let r4 = r2 * r2;
        let e = self.u0.exp() / self.k();
        for (i, (p2, p4)) in [(1.0, 1.0), (2.0, 4.0), (4.0, 16.0), (8.0, 64.0)]
            .into_iter()
            .enumerate()
        {
            y[4 + i] = p4 * e * r4;
            y[8 + i] = if i == 0 { 1.0 } else { 0.0 } + p4 * c4 * r4;
            y[12 + i] = p2 * r2 / 2.0;
        }
        y
    }
}

/// Coefficients of `D⁴u = λe^{u+4t} − p3 D³u − p2 D²u − p1 Du`.
struct Operator {
    p1: f64,
    p2: f64,
    p3: f64,
}

impl Operator {
    fn new(n: u32) -> Operator {
        let n = f64::from(n);
        Operator {
            p1: -2.0 * (n - 2.0) * (n - 4.0),
            p2: n * n - 10.0 * n + 20.0,
            p3: 2.0 * n - 8.0,
        }
    }

    fn linear(&self, d1: f64, d2: f64, d3: f64) -> f64 {
        -self.p3 * d3 - self.p2 * d2 - self.p1 * d1
    }
}

fn failure(err: Failure) -> BranchError {
    match err {
        Failure::StepUnderflow { t } | Failure::TooManySteps { t } => {
            BranchError::Divergence { r: t.exp() }
        }
    }
}

fn validate(shot: &Shot) -> Result<(), BranchError> {
    if shot.n == 0 {
        return Err(BranchError::InvalidParameter("N must be positive".into()));
    }
    if !(shot.lambda.is_finite() && shot.u0.is_finite() && shot.u2_0.is_finite())
        || shot.lambda < 0.0
    {
        return Err(BranchError::InvalidParameter(format!(
            "need finite lambda >= 0, u0, u2_0; got {}, {}, {}",
            shot.lambda, shot.u0, shot.u2_0
        )));
    }
    Ok(())
}

/// The state and each sensitivity block split as in
/// [`IntegrateOptions::tolerance`].
const SENSITIVITY_GROUPS: &[(usize, usize)] = &[
    (0, 1),
    (1, 4),
    (4, 5),
    (5, 8),
    (8, 9),
    (9, 12),
    (12, 13),
    (13, 16),
];

/// Initial step in `t`.
const H0: f64 = 1e-3;

/// Integrates from the series start to `r = 1`.
pub(crate) fn integrate_shot(
    shot: &Shot,
    opts: &IntegrateOptions,
) -> Result<RadialState, BranchError> {
    Ok(profile_shot(shot, &[1.0], opts)?[0])
}

/// States at each radius of the ascending `grid` in `(0, 1]`; radii inside
/// the start radius are filled from the series.
pub(crate) fn profile_shot(
    shot: &Shot,
    grid: &[f64],
    opts: &IntegrateOptions,
) -> Result<Vec<RadialState>, BranchError> {
    validate(shot)?;
    if grid.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(BranchError::InvalidParameter(
            "grid must be ascending in (0, 1]".into(),
        ));
    }
    let op = Operator::new(shot.n);
    let lambda = shot.lambda;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = y[3];
        dy[3] = lambda * (y[0] + 4.0 * t).exp() + op.linear(y[1], y[2], y[3]);
    };
    let r0 = shot.start_radius(opts);
    let mut t = r0.ln();
    let mut y = shot.series(r0);
    let mut h = H0;
    let mut stats = Stats::default();
    let tol = opts.tolerance();
    let mut out = Vec::with_capacity(grid.len());
    for &target in grid {
        if target <= r0 {
            out.push(RadialState::from_log(target.ln(), &shot.series(target)));
            continue;
        }
        let tt = if target == 1.0 { 0.0 } else { target.ln() };
        if tt > t {
            ode::integrate(rhs, t, tt, &mut y, &mut h, &tol, &mut stats).map_err(failure)?;
            t = tt;
        }
        out.push(RadialState::from_log(t, &y));
    }
    Ok(out)
}

/// State at `r = 1` and its 4×3 Jacobian with respect to `(λ, u0, u2_0)`
/// in the log variables; rows 0 and 1 are `∂u(1)` and `∂u′(1)`.
pub(crate) fn integrate_with_jacobian(
    shot: &Shot,
    opts: &IntegrateOptions,
) -> Result<(RadialState, [[f64; 3]; 4]), BranchError> {
    validate(shot)?;
    let op = Operator::new(shot.n);
    let lambda = shot.lambda;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let e = (y[0] + 4.0 * t).exp();
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = y[3];
        dy[3] = lambda * e + op.linear(y[1], y[2], y[3]);
        for j in 0..3 {
            let b = 4 + 4 * j;
            dy[b] = y[b + 1];
            dy[b + 1] = y[b + 2];
            dy[b + 2] = y[b + 3];
            let forcing = if j == 0 { e } else { 0.0 };
            dy[b + 3] = lambda * e * y[b] + op.linear(y[b + 1], y[b + 2], y[b + 3]) + forcing;
        }
    };
    let r0 = shot.start_radius(opts);
    let mut y = shot.series_with_sensitivity(r0);
    let mut h = H0;
    let tol = Tolerance {
        groups: SENSITIVITY_GROUPS,
        ..opts.tolerance()
    };
    ode::integrate(
        rhs,
        r0.ln(),
        0.0,
        &mut y,
        &mut h,
        &tol,
        &mut Stats::default(),
    )
    .map_err(failure)?;
    let mut jac = [[0.0; 3]; 4];
    for (i, row) in jac.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = y[4 + 4 * j + i];
        }
    }
    Ok((RadialState::from_log(0.0, &y), jac))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CriticalPoint {
    pub log_rho: f64,
    /// `V(ρ)`.
    pub v: f64,
    /// Extremes of `V` over the scanned chunk ends in `[0, ρ]`.
    pub v_min: f64,
    pub v_max: f64,
}

/// Width in `t` of the chunks scanned for the first critical point.
const CHUNK: f64 = 0.1;

/// First critical point of the entire problem `Δ²V = eⱽ`, `V(0) = 0`,
/// `V″(0) = beta < 0`.
///
/// Finds the least `ρ > 0` with `V′(ρ) = 0`, or `None` if `V` falls below
/// `floor` or `ln ρ` passes `t_cap` first.
pub(crate) fn first_critical_point(
    n: u32,
    beta: f64,
    floor: f64,
    t_cap: f64,
    opts: &IntegrateOptions,
) -> Result<Option<CriticalPoint>, BranchError> {
    if !(beta < 0.0) {
        return Err(BranchError::InvalidParameter(format!(
            "curvature must be negative, got {beta}"
        )));
    }
    let shot = Shot {
        n,
        lambda: 1.0,
        u0: 0.0,
        u2_0: beta,
    };
    validate(&shot)?;
    let op = Operator::new(n);
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = y[3];
        dy[3] = (y[0] + 4.0 * t).exp() + op.linear(y[1], y[2], y[3]);
    };
    let tol = opts.tolerance();
    let mut stats = Stats::default();
    let r0 = shot.start_radius(opts);
    let mut t = r0.ln();
    let mut y = shot.series(r0);
    let mut h = H0;
    let mut range = (y[0].min(0.0), y[0].max(0.0));
    loop {
        if t >= t_cap || y[0] < floor {
            return Ok(None);
        }
        let (ta, ya) = (t, y);
        ode::integrate(rhs, ta, ta + CHUNK, &mut y, &mut h, &tol, &mut stats).map_err(failure)?;
        t = ta + CHUNK;
        if y[1] < 0.0 {
            range = (range.0.min(y[0]), range.1.max(y[0]));
            continue;
        }
        // DV < 0 at ta and DV >= 0 at t: safeguarded Newton on DV(t) = 0.
        let (mut lo, mut hi) = (ta, t);
        let mut tm = ta + CHUNK * ya[1] / (ya[1] - y[1]);
        let mut best = (t, y);
        for _ in 0..100 {
            let mut ym = ya;
            let mut hm = H0.min(tm - ta).max(f64::MIN_POSITIVE);
            if tm > ta {
                ode::integrate(rhs, ta, tm, &mut ym, &mut hm, &tol, &mut stats).map_err(failure)?;
            }
            best = (tm, ym);
            if ym[1] == 0.0 {
                break;
            }
            if ym[1] < 0.0 {
                lo = tm;
            } else {
                hi = tm;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
            let newton = tm - ym[1] / ym[2];
            tm = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        let v = best.1[0];
        range = (range.0.min(v), range.1.max(v));
        return Ok(Some(CriticalPoint {
            log_rho: best.0,
            v,
            v_min: range.0,
            v_max: range.1,
        }));
    }
}

/// Integrates `Δ²u = λeᵘ` from the regular series at the origin to `r = 1`.
///
/// Fails with [`BranchError::Divergence`] when the solution blows up
/// before `r = 1`.
pub fn integrate(
    n: u32,
    lambda: f64,
    u0: f64,
    u2_0: f64,
    opts: &IntegrateOptions,
) -> Result<RadialState, BranchError> {
    integrate_shot(
        &Shot {
            n,
            lambda,
            u0,
            u2_0,
        },
        opts,
    )
}

/// Radial profile at the ascending radii `grid`.
pub fn profile(
    n: u32,
    lambda: f64,
    u0: f64,
    u2_0: f64,
    grid: &[f64],
    opts: &IntegrateOptions,
) -> Result<Vec<RadialState>, BranchError> {
    profile_shot(
        &Shot {
            n,
            lambda,
            u0,
            u2_0,
        },
        grid,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> IntegrateOptions {
        IntegrateOptions::default()
    }

    #[test]
    fn zero_data_stays_zero() {
        let s = integrate(13, 0.0, 0.0, 0.0, &opts()).unwrap();
        assert_eq!((s.u, s.u1, s.u2, s.u3), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(s.r, 1.0);
    }

    #[test]
    fn linear_problem_matches_biharmonic_polynomial() {
        // With λ = 0 the regular solution is u0 + (u2_0/2) r².
        for (a, b) in [(1.5, -3.0), (-2.0, 0.7), (0.0, 10.0)] {
            for n in [5u32, 13, 31] {
                let s = integrate(n, 0.0, a, b, &opts()).unwrap();
                assert!((s.u - (a + b / 2.0)).abs() < 1e-8, "{n} {a} {b}: {s:?}");
                assert!((s.u1 - b).abs() < 1e-8);
                assert!((s.u2 - b).abs() < 1e-8);
                assert!(s.u3.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn small_lambda_matches_perturbation() {
        // To first order in λ the clamped solution is λ(1 − r²)²/(8N(N+2)),
        // i.e. u0 = λ/(8N(N+2)), u2_0 = −4 u0.
        let n = 13u32;
        let lambda = 1e-6;
        let u0 = lambda / (8.0 * 13.0 * 15.0);
        let s = integrate(n, lambda, u0, -4.0 * u0, &opts()).unwrap();
        assert!(s.boundary_defect() < 1e-13, "{s:?}");
    }

    #[test]
    fn start_radius_sensitivity_is_small() {
        let a = integrate(13, 1000.0, 0.5, -2.0, &opts()).unwrap();
        let b = integrate(
            13,
            1000.0,
            0.5,
            -2.0,
            &IntegrateOptions {
                eps: 1e-7,
                ..opts()
            },
        )
        .unwrap();
        assert!((a.u - b.u).abs() < 1e-7, "{a:?} {b:?}");
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let shot = Shot {
            n: 13,
            lambda: 1500.0,
            u0: 1.2,
            u2_0: -5.0,
        };
        let o = opts().with_rtol(1e-12);
        let (base, jac) = integrate_with_jacobian(&shot, &o).unwrap();
        let plain = integrate_shot(&shot, &o).unwrap();
        assert!((base.u - plain.u).abs() < 1e-9);
        let steps = [1e-3, 1e-6, 1e-6];
        for (j, h) in steps.iter().enumerate() {
            let mut p = shot;
            let mut m = shot;
            match j {
                0 => {
                    p.lambda += h;
                    m.lambda -= h;
                }
                1 => {
                    p.u0 += h;
                    m.u0 -= h;
                }
                _ => {
                    p.u2_0 += h;
                    m.u2_0 -= h;
                }
            }
            let (sp, sm) = (
                integrate_shot(&p, &o).unwrap(),
                integrate_shot(&m, &o).unwrap(),
            );
            let fd = [(sp.u - sm.u) / (2.0 * h), (sp.u1 - sm.u1) / (2.0 * h)];
            for i in 0..2 {
                let scale = jac[i][j].abs().max(1e-3);
                assert!(
                    (fd[i] - jac[i][j]).abs() / scale < 1e-4,
                    "d{i}/d{j}: {} vs {}",
                    fd[i],
                    jac[i][j]
                );
            }
        }
    }

    #[test]
    fn critical_point_maps_to_clamped_solution() {
        // u(r) = V(ρr) − V(ρ) solves the clamped problem with
        // λ = ρ⁴e^{V(ρ)}, u0 = −V(ρ), u″(0) = βρ².
        let beta = -0.05;
        let c = first_critical_point(13, beta, -100.0, 60.0, &opts())
            .unwrap()
            .unwrap();
        let (t, v) = (c.log_rho, c.v);
        assert_eq!((c.v_max, c.v_min), (0.0, v));
        let rho = t.exp();
        let lambda = (4.0 * t + v).exp();
        let s = integrate(13, lambda, -v, beta * rho * rho, &opts()).unwrap();
        assert!(s.boundary_defect() < 1e-8, "{s:?}");
        assert!(first_critical_point(13, 0.0, -100.0, 60.0, &opts()).is_err());
        // A low floor is hit before any critical point for very negative β.
        assert_eq!(
            first_critical_point(13, -1e3, -5.0, 60.0, &opts()).unwrap(),
            None
        );
    }

    #[test]
    fn large_data_diverges() {
        // A large positive centre with positive curvature blows up.
        let err = integrate(13, 1e4, 20.0, 50.0, &opts()).unwrap_err();
        assert!(matches!(err, BranchError::Divergence { .. }), "{err:?}");
    }

    #[test]
    fn profile_is_consistent_with_endpoint() {
        let grid: Vec<f64> = (1..=10).map(|i| f64::from(i) / 10.0).collect();
        let p = profile(13, 1000.0, 0.5, -2.0, &grid, &opts()).unwrap();
        let end = integrate(13, 1000.0, 0.5, -2.0, &opts()).unwrap();
        assert!((p[9].u - end.u).abs() < 1e-8);
        assert!(profile(13, 0.0, 0.0, 0.0, &[0.5, 0.2], &opts()).is_err());
        assert!(integrate(13, -1.0, 0.0, 0.0, &opts()).is_err());
    }
}
