//! Validated numerics for the clamped biharmonic problem `Δ²u = λeᵘ` on the
//! unit ball.
//!
//! * [`interval`]: outward-rounded interval arithmetic and rigorous
//!   one-dimensional branch and bound.
//! * [`radial`]: exact calculus on log-polynomials in `r` and the radial
//!   expressions built from them.
//! * [`certifier`]: interval certificates for the pointwise inequalities
//!   behind the singularity argument, per dimension.
//! * [`branch`]: a floating-point shooting and continuation solver for the
//!   minimal branch, used as numerical evidence only.

pub mod branch;
pub mod certifier;
pub mod interval;
pub mod radial;

pub use interval::{BoundEnclosure, Interval, SearchOptions};
