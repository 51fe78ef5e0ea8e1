//! Rigorous global bounds of a univariate function by branch and bound.
//!
//! The search keeps a priority queue of sub-boxes keyed by their interval
//! bound (largest upper bound first for a supremum) and a best point
//! witness. A box whose bound cannot beat the witness is discarded, the
//! best box is bisected at its midpoint, and the run stops once the witness
//! and the best remaining bound are within the tolerance. Everything is
//! sequential and ordered, so the result is bit-identical across runs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::Interval;

/// A function that can be enclosed over intervals.
pub trait Enclose {
    /// An interval containing `{ f(x) : x in domain }`.
    fn enclose(&self, domain: Interval) -> Interval;

    fn enclose_point(&self, x: f64) -> Interval {
        self.enclose(Interval::point(x))
    }
}

impl<F> Enclose for F
where
    F: Fn(Interval) -> Interval,
{
    fn enclose(&self, domain: Interval) -> Interval {
        self(domain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Stopping gap, relative to `max(1, |bound|)`.
    pub tol: f64,
    pub max_depth: u32,
    /// Cap on the number of bisections.
    pub max_boxes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol: 1e-6,
            max_depth: 60,
            max_boxes: 2_000_000,
        }
    }
}

impl SearchOptions {
    pub fn with_tol(tol: f64) -> Self {
        SearchOptions {
            tol,
            ..Default::default()
        }
    }

    pub(crate) fn abs_tol(&self, reference: f64) -> f64 {
        if reference.is_finite() {
            self.tol * reference.abs().max(1.0)
        } else {
            self.tol
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Converged,
    /// Depth or box budget ran out before the gap closed.
    Inconclusive,
}

/// Result of a rigorous extremum search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundEnclosure {
    /// Contains the true supremum (or infimum).
    pub value: Interval,
    /// Hull of the boxes that may still contain an extremizer.
    pub argmax_box: Interval,
    pub subdivisions: usize,
    pub depth: u32,
    pub status: SearchStatus,
}

impl BoundEnclosure {
    pub fn converged(&self) -> bool {
        self.status == SearchStatus::Converged
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Max,
    Min,
}

impl Goal {
    /// The bound of a box enclosure that matters for this goal.
    fn bound(self, enc: Interval) -> f64 {
        match self {
            Goal::Max => enc.hi(),
            Goal::Min => enc.lo(),
        }
    }

    /// The guaranteed value a point enclosure contributes as a witness.
    fn witness(self, enc: Interval) -> f64 {
        match self {
            Goal::Max => enc.lo(),
            Goal::Min => enc.hi(),
        }
    }

    /// `a` is at least as extreme as `b`.
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Goal::Max => a > b,
            Goal::Min => a < b,
        }
    }

    fn worst(self) -> f64 {
        match self {
            Goal::Max => f64::NEG_INFINITY,
            Goal::Min => f64::INFINITY,
        }
    }
}

struct Node {
    domain: Interval,
    enc: Interval,
    depth: u32,
    key: f64,
    goal: Goal,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_key = match self.goal {
            Goal::Max => self.key.total_cmp(&other.key),
            Goal::Min => other.key.total_cmp(&self.key),
        };
        // Ties go to the leftmost box.
        by_key.then_with(|| other.domain.lo().total_cmp(&self.domain.lo()))
    }
}

fn sanitize(enc: Interval) -> Interval {
    if enc.is_empty() {
        Interval::ENTIRE
    } else {
        enc
    }
}

/// Encloses `sup { f(x) : x in domain }`.
///
/// On success `value.width()` is at most `tol * max(1, |sup|)`. When the
/// budget runs out the best enclosure found so far is returned with status
/// [`SearchStatus::Inconclusive`].
pub fn certified_sup<F: Enclose + ?Sized>(
    f: &F,
    domain: Interval,
    opts: &SearchOptions,
) -> BoundEnclosure {
    search(f, domain, opts, Goal::Max)
}

/// Encloses `inf { f(x) : x in domain }`; `argmax_box` then holds the
/// possible minimizers.
pub fn certified_inf<F: Enclose + ?Sized>(
    f: &F,
    domain: Interval,
    opts: &SearchOptions,
) -> BoundEnclosure {
    search(f, domain, opts, Goal::Min)
}

fn search<F: Enclose + ?Sized>(
    f: &F,
    domain: Interval,
    opts: &SearchOptions,
    goal: Goal,
) -> BoundEnclosure {
    assert!(!domain.is_empty(), "empty search domain");

    let mut best = goal.worst();
    let offer = |x: f64, best: &mut f64| {
        let w = goal.witness(sanitize(f.enclose_point(x)));
        if !w.is_nan() && goal.better(w, *best) {
            *best = w;
        }
    };
    offer(domain.lo(), &mut best);
    offer(domain.hi(), &mut best);
    offer(domain.mid(), &mut best);

    let root_enc = sanitize(f.enclose(domain));
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        domain,
        enc: root_enc,
        depth: 0,
        key: goal.bound(root_enc),
        goal,
    });
    let mut frozen: Vec<Node> = Vec::new();
    let mut subdivisions = 0usize;
    let mut max_depth_seen = 0u32;

    let frozen_bound = |frozen: &[Node]| {
        frozen.iter().map(|n| n.key).fold(
            goal.worst(),
            |acc, k| if goal.better(k, acc) { k } else { acc },
        )
    };

    let mut status = SearchStatus::Converged;
    loop {
        let Some(top) = heap.pop() else {
            if !frozen.is_empty() {
                let bound = frozen_bound(&frozen);
                if gap(goal, bound, best) > opts.abs_tol(best) {
                    status = SearchStatus::Inconclusive;
                }
            }
            break;
        };
        // Stale boxes that can no longer hold the extremum.
        if goal.better(best, top.key) {
            continue;
        }
        let fb = frozen_bound(&frozen);
        let bound = if goal.better(fb, top.key) {
            fb
        } else {
            top.key
        };
        if gap(goal, bound, best) <= opts.abs_tol(best) {
            heap.push(top);
            break;
        }
        if top.depth >= opts.max_depth || subdivisions >= opts.max_boxes || top.domain.is_point() {
            frozen.push(top);
            continue;
        }

        let (left, right) = top.domain.bisect();
        if left.hi() == top.domain.lo() || right.lo() == top.domain.hi() {
            // Cannot split further in binary64.
            frozen.push(top);
            continue;
        }
        subdivisions += 1;
        let depth = top.depth + 1;
        max_depth_seen = max_depth_seen.max(depth);
        offer(left.hi(), &mut best);
        for child in [left, right] {
            offer(child.mid(), &mut best);
            let mut enc = sanitize(f.enclose(child));
            let narrowed = enc.intersect(top.enc);
            if !narrowed.is_empty() {
                enc = narrowed;
            }
            let key = goal.bound(enc);
            if goal.better(best, key) {
                continue;
            }
            heap.push(Node {
                domain: child,
                enc,
                depth,
                key,
                goal,
            });
        }
    }

    let live: Vec<&Node> = heap
        .iter()
        .chain(frozen.iter())
        .filter(|n| !goal.better(best, n.key))
        .collect();
    // The box holding the true extremizer is never beaten by the witness,
    // so `live` is non-empty and its best key bounds the extremum.
    let mut bound = best;
    let mut argmax_box = Interval::EMPTY;
    for n in &live {
        if goal.better(n.key, bound) {
            bound = n.key;
        }
        argmax_box = argmax_box.hull(n.domain);
    }
    let value = match goal {
        Goal::Max => Interval::try_new(best, bound),
        Goal::Min => Interval::try_new(bound, best),
    }
    .unwrap_or(Interval::ENTIRE);
    BoundEnclosure {
        value,
        argmax_box,
        subdivisions,
        depth: max_depth_seen,
        status,
    }
}

fn gap(goal: Goal, bound: f64, best: f64) -> f64 {
    match goal {
        Goal::Max => bound - best,
        Goal::Min => best - bound,
    }
}
