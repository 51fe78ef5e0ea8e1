//! Adaptive bisection proof that a function keeps one sign on a domain.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::interval::{Enclose, Interval, SearchOptions};

/// The sign a residual is claimed to have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    NonPositive,
    Negative,
    NonNegative,
    Positive,
}

impl Sense {
    /// Maps an enclosure of `f` to one of `g` where the claim reads `g ≤ 0`
    /// (or `g < 0` when strict).
    fn orient(self, enc: Interval) -> Interval {
        match self {
            Sense::NonPositive | Sense::Negative => enc,
            Sense::NonNegative | Sense::Positive => -enc,
        }
    }

    fn strict(self) -> bool {
        matches!(self, Sense::Negative | Sense::Positive)
    }

    /// Every value in the oriented enclosure satisfies the claim.
    fn holds(self, oriented: Interval) -> bool {
        if oriented.is_empty() {
            return false;
        }
        if self.strict() {
            oriented.hi() < 0.0
        } else {
            oriented.hi() <= 0.0
        }
    }

    /// Every value in the oriented enclosure violates the claim.
    fn violated(self, oriented: Interval) -> bool {
        if oriented.is_empty() {
            return false;
        }
        if self.strict() {
            oriented.lo() >= 0.0
        } else {
            oriented.lo() > 0.0
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sense::NonPositive => "<= 0",
            Sense::Negative => "< 0",
            Sense::NonNegative => ">= 0",
            Sense::Positive => "> 0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertStatus {
    Certified,
    /// `residual` is the outward-rounded enclosure of the claim's residual
    /// at the machine number `witness`, and lies entirely on the wrong side.
    Falsified {
        #[serde(with = "crate::interval::float_text")]
        witness: f64,
        residual: Interval,
    },
    /// Some boxes neither certified nor produced a witness within budget.
    Inconclusive {
        unresolved: usize,
    },
}

/// Outcome of one certification job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub claim: String,
    pub domain: Interval,
    pub status: CertStatus,
    pub subdivisions: usize,
    /// Number of boxes in the final partition.
    pub leaves: usize,
    /// Largest oriented upper bound over the leaves; `≤ 0` on success and
    /// its magnitude is the certified margin.
    #[serde(with = "crate::interval::float_text")]
    pub max_gap: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Certificate>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertStatus::Certified
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self.status, CertStatus::Falsified { .. })
    }

    /// Conjunction of several claims. Falsified wins over inconclusive.
    pub fn all_of(claim: impl Into<String>, parts: Vec<Certificate>) -> Certificate {
        let domain = parts
            .iter()
            .fold(Interval::EMPTY, |acc, c| acc.hull(c.domain));
        let falsified = parts
            .iter()
            .find(|c| c.is_falsified())
            .map(|c| c.status.clone());
        let unresolved: usize = parts
            .iter()
            .map(|c| match c.status {
                CertStatus::Inconclusive { unresolved } => unresolved.max(1),
                _ => 0,
            })
            .sum();
        let status = match falsified {
            Some(s) => s,
            None if unresolved > 0 => CertStatus::Inconclusive { unresolved },
            None => CertStatus::Certified,
        };
        Certificate {
            claim: claim.into(),
            domain,
            status,
            subdivisions: parts.iter().map(|c| c.subdivisions).sum(),
            leaves: parts.iter().map(|c| c.leaves).sum(),
            max_gap: parts
                .iter()
                .map(|c| c.max_gap)
                .fold(f64::NEG_INFINITY, f64::max),
            elapsed: parts.iter().map(|c| c.elapsed).sum(),
            parts,
        }
    }

    /// A claim settled by exact symbolic computation.
    pub fn exact(
        claim: impl Into<String>,
        domain: Interval,
        holds: bool,
        witness: Option<(f64, Interval)>,
    ) -> Certificate {
        let status = if holds {
            CertStatus::Certified
        } else {
            let (witness, residual) = witness.unwrap_or((f64::NAN, Interval::ENTIRE));
            CertStatus::Falsified { witness, residual }
        };
        Certificate {
            claim: claim.into(),
            domain,
            status,
            subdivisions: 0,
            leaves: 1,
            max_gap: if holds { 0.0 } else { f64::INFINITY },
            parts: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }
}

/// Proves `f sense` on `domain` by depth-first bisection, left box first.
///
/// A leaf is accepted when the interval enclosure of `f` has the claimed
/// sign throughout. When a box does not, the endpoints and midpoint are
/// evaluated as point witnesses; a witness whose enclosure lies strictly on
/// the wrong side ends the run as falsified. Boxes that exhaust the depth or
/// box budget leave the run inconclusive.
pub fn certify_sign<F: Enclose + ?Sized>(
    claim: impl Into<String>,
    f: &F,
    domain: Interval,
    sense: Sense,
    opts: &SearchOptions,
) -> Certificate {
    let start = Instant::now();
    let mut stack = vec![(domain, 0u32)];
    let mut subdivisions = 0usize;
    let mut leaves = 0usize;
    let mut unresolved = 0usize;
    let mut max_gap = f64::NEG_INFINITY;
    let mut status = None;

    let probe = |x: f64| -> Option<(f64, Interval)> {
        let enc = f.enclose_point(x);
        sense.violated(sense.orient(enc)).then_some((x, enc))
    };

    while let Some((bx, depth)) = stack.pop() {
        let oriented = sense.orient(f.enclose(bx));
        if sense.holds(oriented) {
            leaves += 1;
            max_gap = max_gap.max(oriented.hi());
            continue;
        }
        let witness = probe(bx.lo())
            .or_else(|| probe(bx.mid()))
            .or_else(|| probe(bx.hi()));
        if let Some((witness, residual)) = witness {
            leaves += 1;
            max_gap = max_gap.max(oriented.hi());
            status = Some(CertStatus::Falsified { witness, residual });
            break;
        }
        let (left, right) = bx.bisect();
        let splittable = left.hi() > bx.lo() && right.lo() < bx.hi();
        if depth >= opts.max_depth || subdivisions >= opts.max_boxes || !splittable {
            leaves += 1;
            unresolved += 1;
            max_gap = max_gap.max(oriented.hi());
            continue;
        }
        subdivisions += 1;
        stack.push((right, depth + 1));
        stack.push((left, depth + 1));
    }

    let status = status.unwrap_or(if unresolved > 0 {
        CertStatus::Inconclusive { unresolved }
    } else {
        CertStatus::Certified
    });
    Certificate {
        claim: claim.into(),
        domain,
        status,
        subdivisions,
        leaves,
        max_gap: if max_gap.is_nan() {
            f64::INFINITY
        } else {
            max_gap
        },
        parts: Vec::new(),
        elapsed: start.elapsed(),
    }
}
