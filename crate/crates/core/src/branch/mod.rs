//! Floating-point shooting and continuation for the minimal branch of
//! `Δ²u = λeᵘ` in the unit ball with `u = ∂u/∂n = 0` on the boundary.
//!
//! Radial solutions are parametrized by `(λ, u(0), u″(0))`; the boundary
//! conditions are the two equations `u(1) = u′(1) = 0`. Nothing here is
//! validated: results are numerical evidence to compare against the
//! certified bounds.

mod continuation;
mod linalg;
mod ode;
mod radial;
mod shooting;

use thiserror::Error;

pub use continuation::{
    check_pointwise_monotone, continue_branch, Branch, BranchSummary, ContinuationOptions, Fold,
    MonotoneReport, Termination, MINIMALITY_NOTE,
};
pub use radial::{integrate, profile, IntegrateOptions, RadialState};
pub use shooting::{shoot, BranchPoint, ShootOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BranchError {
    /// The solution blew up (or the step size collapsed) before `r = 1`.
    #[error("integration diverged near r = {r:e}")]
    Divergence { r: f64 },
    #[error("Newton iteration did not converge at lambda = {lambda} (reached lambda = {reached}, defect {residual:e})")]
    NoConvergence {
        lambda: f64,
        reached: f64,
        residual: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
