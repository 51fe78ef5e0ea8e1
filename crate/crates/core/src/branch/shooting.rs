//! Newton shooting for the minimal solution at a fixed `λ`.

use serde::{Deserialize, Serialize};

use super::linalg;
use super::radial::{integrate_with_jacobian, profile_shot, IntegrateOptions, Shot};
use super::BranchError;

/// One solution on the branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchPoint {
    pub lambda: f64,
    pub u0: f64,
    pub u2_0: f64,
    /// `max |u|` over the radii sampled in `[0, 1]`, including `r = 0`.
    pub sup_norm: f64,
    /// `max(|u(1)|, |u′(1)|)` from a direct integration of `(λ, u0, u2_0)`;
    /// infinite if that integration diverges.
    #[serde(with = "crate::interval::float_text")]
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootOptions {
    pub integrate: IntegrateOptions,
    /// Accept once the boundary defect is at most this.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Largest `λ` step of the warm-start continuation, in units of
    /// `8N(N+2)`.
    pub max_step: f64,
    /// Give up once the `λ` step falls below this fraction of the target.
    pub min_step: f64,
    /// Intervals of the grid on which `sup_norm` is measured.
    pub sup_grid: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            integrate: IntegrateOptions::default(),
            newton_tol: 1e-9,
            max_newton: 20,
            max_step: 0.25,
            min_step: 1e-9,
            sup_grid: 200,
        }
    }
}

/// `8N(N+2)`: the linear response `u0 ≈ λ/(8N(N+2))` near `λ = 0`.
pub(crate) fn lambda_scale(n: u32) -> f64 {
    let n = f64::from(n);
    8.0 * n * (n + 2.0)
}

pub(crate) fn uniform_grid(intervals: usize) -> Vec<f64> {
    let m = intervals.max(1);
    (1..=m).map(|i| i as f64 / m as f64).collect()
}

/// `max |u|` over `{0} ∪ grid`.
pub(crate) fn sup_norm(
    shot: &Shot,
    intervals: usize,
    opts: &IntegrateOptions,
) -> Result<f64, BranchError> {
    let states = profile_shot(shot, &uniform_grid(intervals), opts)?;
    Ok(states.iter().fold(shot.u0.abs(), |m, s| m.max(s.u.abs())))
}

pub(crate) fn point(
    shot: &Shot,
    residual: f64,
    sup_grid: usize,
    opts: &IntegrateOptions,
) -> Result<BranchPoint, BranchError> {
    Ok(BranchPoint {
        lambda: shot.lambda,
        u0: shot.u0,
        u2_0: shot.u2_0,
        sup_norm: sup_norm(shot, sup_grid, opts)?,
        residual,
    })
}

struct Converged {
    shot: Shot,
    residual: f64,
    /// `d(u0, u2_0)/dλ` along the solution curve.
    slope: [f64; 2],
}

/// Newton on `(u0, u2_0)` at fixed `λ`.
fn newton(mut shot: Shot, opts: &ShootOptions) -> Result<Converged, BranchError> {
    let mut residual = f64::INFINITY;
    for _ in 0..=opts.max_newton {
        let (state, jac) = integrate_with_jacobian(&shot, &opts.integrate)?;
        residual = state.boundary_defect();
        let jx = [[jac[0][1], jac[0][2]], [jac[1][1], jac[1][2]]];
        if residual <= opts.newton_tol {
            let slope = linalg::solve(jx, [-jac[0][0], -jac[1][0]]).unwrap_or([0.0, 0.0]);
            return Ok(Converged {
                shot,
                residual,
                slope,
            });
        }
        let Some(delta) = linalg::solve(jx, [-state.u, -state.u1]) else {
            break;
        };
        shot.u0 += delta[0];
        shot.u2_0 += delta[1];
    }
    Err(BranchError::NoConvergence {
        lambda: shot.lambda,
        reached: shot.lambda,
        residual,
    })
}

/// The minimal solution at `lambda`, reached by natural continuation in `λ`
/// from `u ≡ 0` at `λ = 0`.
///
/// Fails with [`BranchError::NoConvergence`] when the continuation cannot
/// advance, which happens as `lambda` approaches or exceeds `λ*`.
pub fn shoot(n: u32, lambda: f64, opts: &ShootOptions) -> Result<BranchPoint, BranchError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(BranchError::InvalidParameter(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    if n == 0 {
        return Err(BranchError::InvalidParameter("N must be positive".into()));
    }
    let scale = lambda_scale(n);
    let mut current = Converged {
        shot: Shot {
            n,
            lambda: 0.0,
            u0: 0.0,
            u2_0: 0.0,
        },
        residual: 0.0,
        slope: [0.0; 2],
    };
    {
        let (state, jac) = integrate_with_jacobian(&current.shot, &opts.integrate)?;
        current.residual = state.boundary_defect();
        let jx = [[jac[0][1], jac[0][2]], [jac[1][1], jac[1][2]]];
        current.slope = linalg::solve(jx, [-jac[0][0], -jac[1][0]]).unwrap_or([0.0, 0.0]);
    }
    let mut step = (opts.max_step * scale).min(lambda);
    while current.shot.lambda < lambda {
        let target = (current.shot.lambda + step).min(lambda);
        let dl = target - current.shot.lambda;
        let guess = Shot {
            n,
            lambda: target,
            u0: current.shot.u0 + dl * current.slope[0],
            u2_0: current.shot.u2_0 + dl * current.slope[1],
        };
        match newton(guess, opts) {
            Ok(next) => {
                current = next;
                step = (step * 1.5).min(opts.max_step * scale);
            }
            Err(err) => {
                step /= 2.0;
                if step < opts.min_step * lambda.max(1.0) {
                    let residual = match err {
                        BranchError::NoConvergence { residual, .. } => residual,
                        _ => f64::INFINITY,
                    };
                    return Err(BranchError::NoConvergence {
                        lambda,
                        reached: current.shot.lambda,
                        residual,
                    });
                }
            }
        }
    }
    point(
        &current.shot,
        current.residual,
        opts.sup_grid,
        &opts.integrate,
    )
}
