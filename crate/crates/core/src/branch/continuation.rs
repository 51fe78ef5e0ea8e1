//! Continuation of the branch from `u ≡ 0` at `λ = 0`.
//!
//! The equation is invariant under `u(r) ↦ u(μr) + 4 ln μ`, so every radial
//! solution is a rescaling of one solution of `Δ²V = eⱽ` with `V(0) = 0`
//! and `V″(0) = β`. If `ρ` is the first critical point of `V`, then
//! `u(r) = V(ρr) − V(ρ)` satisfies the clamped conditions with
//! `λ = ρ⁴e^{V(ρ)}`, `u0 = −V(ρ)` and `u″(0) = βρ²`. The branch is the
//! image of `β ∈ (β*, 0)` under this map, and each point costs a single
//! initial value problem with no Newton iteration.
//!
//! Steps in `β` are adapted so that consecutive points are at most
//! `ds_max` apart in the `(λ/s_λ, u0)` plane, `s_λ = 8N(N+2)`. A fold is a
//! local maximum of `λ` along the curve, located by golden-section search
//! in `β`. When `λ` saturates instead (the branch escapes to `u0 → ∞` at
//! finite `λ`), the run stops at `u0_max` and `λ*` is the largest `λ` seen.
//!
//! Each point is checked by integrating the clamped problem directly from
//! `(λ, u0, u″(0))`. That map amplifies perturbations roughly like `e^{0.9 u0}`,
//! so the check fails at large `u0` even though the `(λ, u0)` curve is well
//! conditioned. Points up to the first failed check form the verified
//! prefix, reported separately.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::radial::{first_critical_point, integrate_shot, profile_shot, IntegrateOptions, Shot};
use super::shooting::{lambda_scale, uniform_grid, BranchPoint};
use super::BranchError;

pub const MINIMALITY_NOTE: &str =
    "minimality is assumed, not verified: the branch is continued from u = 0 at lambda = 0";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationOptions {
    pub integrate: IntegrateOptions,
    /// First curvature `β` tried; the branch starts at `β → 0⁻`.
    pub beta_init: f64,
    /// Largest distance between consecutive points in `(λ/s_λ, u0)`.
    pub ds_max: f64,
    /// Stop once `u0` exceeds this.
    pub u0_max: f64,
    pub max_points: usize,
    /// Relative accuracy in `λ` to which a fold is located.
    pub fold_rel_tol: f64,
    /// Points kept after a fold before stopping.
    pub past_fold_points: usize,
    /// A point is verified when its direct boundary defect is at most this.
    pub residual_tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            // The direct check shares most of the sweep's global error only
            // when both run at the same tolerance; at 1e-12 the verified
            // prefix reaches u0 ≈ 8 for N = 13.
            integrate: IntegrateOptions::default().with_rtol(1e-12),
            beta_init: -1e-4,
            ds_max: 0.25,
            u0_max: 25.0,
            max_points: 2000,
            fold_rel_tol: 1e-4,
            past_fold_points: 5,
            residual_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Termination {
    /// A fold was located and the run continued a few points past it.
    Fold,
    /// `λ` saturated while `u0` reached `u0_max` without a fold.
    Saturated {
        u0_reached: f64,
    },
    MaxPoints,
    /// The step in `β` fell below floating-point resolution before
    /// `u0_max`; the branch is partial.
    Stalled {
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fold {
    pub point: BranchPoint,
    /// Curvature `β` at the fold and the width of its final bracket.
    pub beta: f64,
    pub beta_width: f64,
    /// `(λ_fold − min λ at the final bracket ends) / λ_fold`.
    pub rel_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub n: u32,
    /// Accepted points in arclength order, starting at `λ = 0`.
    pub points: Vec<BranchPoint>,
    /// Largest `λ` over the computed branch, including a refined fold.
    pub lambda_star: f64,
    /// Length of the leading run of points with `residual <= residual_tol`.
    pub verified: usize,
    pub fold: Option<Fold>,
    pub termination: Termination,
    /// `(λ(last) − λ(u0 − 1)) / λ(last)`: the relative growth of `λ` over
    /// the last unit of `u0`. Small when `λ` has saturated.
    pub tail_growth: Option<f64>,
    pub settings: ContinuationOptions,
}

/// Compact JSON form of a [`Branch`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSummary {
    pub n: u32,
    pub lambda_star: f64,
    pub fold: Option<Fold>,
    pub termination: Termination,
    pub tail_growth: Option<f64>,
    pub points: usize,
    pub verified: usize,
    /// Largest `λ` and `u0` over the verified prefix.
    pub lambda_star_verified: f64,
    pub u0_verified: f64,
    /// `u0` strictly increases over the points with `λ` below `λ*`.
    pub u0_increasing: bool,
    pub minimality: String,
    pub settings: ContinuationOptions,
}

impl Branch {
    /// Points before the maximum of `λ`, i.e. the part of the branch
    /// parametrized by `λ ∈ [0, λ*)`.
    pub fn lower_part(&self) -> &[BranchPoint] {
        let end = self
            .points
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.lambda.total_cmp(&b.1.lambda))
            .map_or(0, |(i, _)| i + 1);
        &self.points[..end]
    }

    pub fn verified_part(&self) -> &[BranchPoint] {
        &self.points[..self.verified]
    }

    pub fn u0_increasing(&self) -> bool {
        self.lower_part().windows(2).all(|w| w[0].u0 < w[1].u0)
    }

    pub fn summary(&self) -> BranchSummary {
        BranchSummary {
            n: self.n,
            lambda_star: self.lambda_star,
            fold: self.fold,
            termination: self.termination.clone(),
            tail_growth: self.tail_growth,
            points: self.points.len(),
            verified: self.verified,
            lambda_star_verified: self
                .verified_part()
                .iter()
                .map(|p| p.lambda)
                .fold(0.0, f64::max),
            u0_verified: self
                .verified_part()
                .iter()
                .map(|p| p.u0)
                .fold(0.0, f64::max),
            u0_increasing: self.u0_increasing(),
            minimality: MINIMALITY_NOTE.to_string(),
            settings: self.settings,
        }
    }

    /// Columns `lambda,u0,u2_0,sup_norm,residual`, shortest round-trip
    /// decimal for each value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "lambda,u0,u2_0,sup_norm,residual")?;
        for p in &self.points {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?},{:?}",
                p.lambda, p.u0, p.u2_0, p.sup_norm, p.residual
            )?;
        }
        Ok(())
    }
}

/// A point of the curve with the curvature that produced it.
#[derive(Debug, Clone, Copy)]
struct Sample {
    beta: f64,
    lambda: f64,
    u0: f64,
    u2_0: f64,
    sup_norm: f64,
}

struct Curve<'a> {
    n: u32,
    scale: f64,
    opts: &'a ContinuationOptions,
}

impl Curve<'_> {
    /// The clamped solution generated by `beta`, if `V` turns before
    /// passing below `−u0_max − 4 ds_max − 1`.
    fn sample(&self, beta: f64) -> Result<Option<Sample>, BranchError> {
        let floor = -(self.opts.u0_max + 4.0 * self.opts.ds_max + 1.0);
        let Some(c) = first_critical_point(self.n, beta, floor, 60.0, &self.opts.integrate)? else {
            return Ok(None);
        };
        Ok(Some(Sample {
            beta,
            lambda: (4.0 * c.log_rho + c.v).exp(),
            u0: -c.v,
            u2_0: beta * (2.0 * c.log_rho).exp(),
            // u = V(ρr) − V(ρ) on [0, 1].
            sup_norm: (c.v_max - c.v).max(c.v - c.v_min),
        }))
    }

    fn distance(&self, a: &Sample, b: &Sample) -> f64 {
        ((a.lambda - b.lambda) / self.scale).hypot(a.u0 - b.u0)
    }

    /// Re-integrates the clamped problem directly from `(λ, u0, u2_0)` for
    /// the boundary defect; infinite if that integration diverges.
    fn point(&self, s: &Sample) -> BranchPoint {
        let shot = Shot {
            n: self.n,
            lambda: s.lambda,
            u0: s.u0,
            u2_0: s.u2_0,
        };
        let residual = integrate_shot(&shot, &self.opts.integrate)
            .map_or(f64::INFINITY, |st| st.boundary_defect());
        BranchPoint {
            lambda: s.lambda,
            u0: s.u0,
            u2_0: s.u2_0,
            sup_norm: s.sup_norm,
            residual,
        }
    }

    /// Golden-section search for the maximum of `λ(β)` on `[a, c]`, given
    /// an interior `b` with `λ(b)` above both ends.
    fn refine_fold(&self, a: Sample, b: Sample, c: Sample) -> Result<Fold, BranchError> {
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        // `lo`/`hi` hold the samples at the bracket ends, ordered by β.
        let (mut lo, mut hi) = if a.beta < c.beta { (a, c) } else { (c, a) };
        let mut best = b;
        let anchor = b.lambda;
        let eval = |beta: f64| -> Result<Sample, BranchError> {
            self.sample(beta)?.ok_or(BranchError::NoConvergence {
                lambda: anchor,
                reached: anchor,
                residual: f64::NAN,
            })
        };
        let mut f1 = eval(hi.beta - INV_PHI * (hi.beta - lo.beta))?;
        let mut f2 = eval(lo.beta + INV_PHI * (hi.beta - lo.beta))?;
        let rel_width = |best: &Sample, lo: &Sample, hi: &Sample| {
            (best.lambda - lo.lambda.min(hi.lambda)) / best.lambda
        };
        for _ in 0..200 {
            for s in [f1, f2] {
                if s.lambda > best.lambda {
                    best = s;
                }
            }
            let width = hi.beta - lo.beta;
            if rel_width(&best, &lo, &hi) <= self.opts.fold_rel_tol * 1e-3
                || width <= 4.0 * f64::EPSILON * hi.beta.abs().max(lo.beta.abs())
            {
                break;
            }
            if f1.lambda > f2.lambda {
                hi = f2;
                f2 = f1;
                f1 = eval(hi.beta - INV_PHI * (hi.beta - lo.beta))?;
            } else {
                lo = f1;
                f1 = f2;
                f2 = eval(lo.beta + INV_PHI * (hi.beta - lo.beta))?;
            }
        }
        Ok(Fold {
            point: self.point(&best),
            beta: best.beta,
            beta_width: hi.beta - lo.beta,
            rel_width: rel_width(&best, &lo, &hi),
        })
    }
}

/// Continues the branch from `(λ, u) = (0, 0)` until a fold is passed,
/// `u0` reaches `u0_max`, the point budget runs out, or the step in the
/// curve parameter underflows. A stall returns the partial branch with
/// [`Termination::Stalled`].
pub fn continue_branch(n: u32, opts: &ContinuationOptions) -> Result<Branch, BranchError> {
    if n == 0 {
        return Err(BranchError::InvalidParameter("N must be positive".into()));
    }
    if !(opts.beta_init < 0.0 && opts.ds_max > 0.0 && opts.u0_max > 0.0) {
        return Err(BranchError::InvalidParameter(
            "need beta_init < 0, ds_max > 0, u0_max > 0".into(),
        ));
    }
    let curve = Curve {
        n,
        scale: lambda_scale(n),
        opts,
    };
    let origin = Sample {
        beta: 0.0,
        lambda: 0.0,
        u0: 0.0,
        u2_0: 0.0,
        sup_norm: 0.0,
    };
    let mut points = vec![BranchPoint {
        lambda: 0.0,
        u0: 0.0,
        u2_0: 0.0,
        sup_norm: 0.0,
        residual: 0.0,
    }];
    let mut samples = vec![origin];
    let mut fold = None;
    let mut past_fold = 0usize;
    let mut step = opts.beta_init;
    let termination = loop {
        let prev = *samples.last().unwrap_or(&origin);
        if prev.u0 >= opts.u0_max {
            break Termination::Saturated {
                u0_reached: prev.u0,
            };
        }
        if points.len() >= opts.max_points {
            break Termination::MaxPoints;
        }
        if fold.is_some() && past_fold >= opts.past_fold_points {
            break Termination::Fold;
        }
        let beta = prev.beta + step;
        if beta == prev.beta {
            break Termination::Stalled {
                reason: format!(
                    "curvature step underflow at beta = {:e}, u0 = {}",
                    prev.beta, prev.u0
                ),
            };
        }
        let next = match curve.sample(beta) {
            Ok(Some(s)) if curve.distance(&prev, &s) <= opts.ds_max => s,
            Ok(_) | Err(BranchError::Divergence { .. }) => {
                step /= 2.0;
                continue;
            }
            Err(e) => return Err(e),
        };
        if curve.distance(&prev, &next) < opts.ds_max / 4.0 {
            step *= 2.0;
        }
        if fold.is_none() && samples.len() >= 2 && next.lambda < prev.lambda {
            let before = samples[samples.len() - 2];
            if prev.lambda > before.lambda {
                fold = Some(curve.refine_fold(before, prev, next)?);
            }
        }
        if fold.is_some() {
            past_fold += 1;
        }
        points.push(curve.point(&next));
        samples.push(next);
    };
    let mut lambda_star = points.iter().map(|p| p.lambda).fold(0.0, f64::max);
    if let Some(f) = &fold {
        lambda_star = lambda_star.max(f.point.lambda);
    }
    let tail_growth = tail_growth(&points);
    let verified = points
        .iter()
        .take_while(|p| p.residual <= opts.residual_tol)
        .count();
    Ok(Branch {
        n,
        points,
        lambda_star,
        verified,
        fold,
        termination,
        tail_growth,
        settings: *opts,
    })
}

fn tail_growth(points: &[BranchPoint]) -> Option<f64> {
    let last = points.last()?;
    let earlier = points.iter().rev().find(|p| p.u0 <= last.u0 - 1.0)?;
    (last.lambda > 0.0).then(|| (last.lambda - earlier.lambda) / last.lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    /// Consecutive pairs `(λ₁ < λ₂)` compared.
    pub pairs: usize,
    pub grid_points: usize,
    /// Grid values with `u_{λ₁}(r) > u_{λ₂}(r) + slack`.
    pub violations: usize,
    /// Largest `u_{λ₁}(r) − u_{λ₂}(r)` seen.
    pub worst: f64,
}

/// Checks `u_{λ₁} ≤ u_{λ₂}` on a uniform grid for consecutive verified
/// points of the lower branch. `slack` absorbs the boundary defect at `r = 1`.
pub fn check_pointwise_monotone(
    branch: &Branch,
    intervals: usize,
    slack: f64,
    opts: &IntegrateOptions,
) -> Result<MonotoneReport, BranchError> {
    let grid = uniform_grid(intervals);
    let lower = branch.lower_part();
    let lower = &lower[..lower.len().min(branch.verified)];
    let mut profiles = Vec::with_capacity(lower.len());
    for p in lower {
        let shot = Shot {
            n: branch.n,
            lambda: p.lambda,
            u0: p.u0,
            u2_0: p.u2_0,
        };
        let mut values = vec![p.u0];
        values.extend(profile_shot(&shot, &grid, opts)?.iter().map(|s| s.u));
        profiles.push((p.lambda, values));
    }
    let mut report = MonotoneReport {
        pairs: 0,
        grid_points: grid.len() + 1,
        violations: 0,
        worst: f64::NEG_INFINITY,
    };
    for w in profiles.windows(2) {
        let ((l1, a), (l2, b)) = (&w[0], &w[1]);
        if l1 >= l2 {
            continue;
        }
        report.pairs += 1;
        for (x, y) in a.iter().zip(b) {
            let d = x - y;
            report.worst = report.worst.max(d);
            if d > slack {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_dimension_has_a_fold() {
        // For small N the branch turns back at a finite u0.
        let b = continue_branch(5, &ContinuationOptions::default()).unwrap();
        assert_eq!(b.termination, Termination::Fold, "{:?}", b.summary());
        let fold = b.fold.unwrap();
        assert!(fold.rel_width <= 1e-4);
        assert_eq!(
            b.lambda_star,
            b.points
                .iter()
                .map(|p| p.lambda)
                .fold(fold.point.lambda, f64::max)
        );
        assert!(b.u0_increasing());
        // Below the fold the direct check passes everywhere.
        assert!(b.verified >= b.lower_part().len(), "{:?}", b.summary());
    }

    #[test]
    fn verified_prefix_is_consistent() {
        let opts = ContinuationOptions {
            u0_max: 12.0,
            ..Default::default()
        };
        let b = continue_branch(13, &opts).unwrap();
        let s = b.summary();
        assert!(s.verified > 10 && s.verified < b.points.len(), "{s:?}");
        assert!(b
            .verified_part()
            .iter()
            .all(|p| p.residual <= opts.residual_tol));
        assert!(b.points[b.verified].residual > opts.residual_tol);
        assert!(s.lambda_star_verified < b.lambda_star);
        let json = serde_json::to_string(&b).unwrap();
        let back: Branch = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn csv_has_fixed_columns() {
        let opts = ContinuationOptions {
            u0_max: 0.5,
            ..Default::default()
        };
        let b = continue_branch(13, &opts).unwrap();
        let mut out = Vec::new();
        b.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("lambda,u0,u2_0,sup_norm,residual"));
        assert_eq!(lines.next(), Some("0.0,0.0,0.0,0.0,0.0"));
        assert_eq!(lines.count(), b.points.len() - 1);
    }
}
