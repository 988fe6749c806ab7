//! Finite-sample upper bound on the overlap index (ComputeBound).
//!
//! Given samples from two distributions and a finite family of condition
//! functions `g_j`, the estimate is
//!
//! ```text
//! 1 - ||mean+ - mean-|| / (2 r_B) - 1/2 max_j (1 - r_A(g_j) / r_B) |E+[g_j] - E-[g_j]|
//! ```
//!
//! where `r_B` is the largest norm in the pooled samples and `r_A(g)` the
//! largest pooled norm inside `A(g)`.

use serde::{Deserialize, Serialize};

use crate::condition::ConditionFunction;
use crate::error::{Error, Result};
use crate::sample::SampleSet;

/// Per-predicate breakdown of a bound computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PredicateTerm {
    /// Radius or threshold of the predicate.
    pub parameter: f64,
    #[serde(rename = "rA")]
    pub r_a: f64,
    #[serde(rename = "sJ")]
    pub s_j: f64,
    pub pos_rate: f64,
    pub neg_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    /// The estimate before clamping. Kept as-is so it stays usable as a score.
    pub raw_bound: f64,
    /// `raw_bound` clamped into `[0, 1]`.
    pub clamped_bound: f64,
    pub mean_gap: f64,
    #[serde(rename = "rB")]
    pub r_b: f64,
    pub per_g: Vec<PredicateTerm>,
    /// Index of the largest `s_j`; ties go to the smallest index.
    pub best_g: usize,
}

impl BoundReport {
    pub fn best_term(&self) -> &PredicateTerm {
        &self.per_g[self.best_g]
    }
}

/// Fraction of rows on which `g` holds.
fn acceptance_rate(set: &SampleSet, g: &ConditionFunction) -> f64 {
    let kind = set.norm_kind();
    let hits = set
        .rows()
        .zip(set.norms())
        .filter(|(row, &n)| g.holds_given_norm(row, kind, n))
        .count();
    hits as f64 / set.len() as f64
}

/// Runs ComputeBound on `pos` versus `neg` over the predicates `gs`.
pub fn compute_bound(
    pos: &SampleSet,
    neg: &SampleSet,
    gs: &[ConditionFunction],
) -> Result<BoundReport> {
    pos.check_compatible(neg)?;
    if gs.is_empty() {
        return Err(Error::input("at least one condition function is required"));
    }
    let kind = pos.norm_kind();
    let r_b = pos.max_norm().max(neg.max_norm());
    let mean_gap = kind.distance(pos.mean(), neg.mean());

    let mut per_g = Vec::with_capacity(gs.len());
    for g in gs {
        let mut r_a = 0.0f64;
        let mut pos_hits = 0usize;
        let mut neg_hits = 0usize;
        for (row, &n) in pos.rows().zip(pos.norms()) {
            if g.holds_given_norm(row, kind, n) {
                pos_hits += 1;
                r_a = r_a.max(n);
            }
        }
        for (row, &n) in neg.rows().zip(neg.norms()) {
            if g.holds_given_norm(row, kind, n) {
                neg_hits += 1;
                r_a = r_a.max(n);
            }
        }
        let pos_rate = pos_hits as f64 / pos.len() as f64;
        let neg_rate = neg_hits as f64 / neg.len() as f64;
        let s_j = if r_b > 0.0 {
            (1.0 - r_a / r_b) * (pos_rate - neg_rate).abs()
        } else {
            0.0
        };
        per_g.push(PredicateTerm {
            parameter: g.parameter(),
            r_a,
            s_j,
            pos_rate,
            neg_rate,
        });
    }

    let (best_g, best_s) = argmax_first(per_g.iter().map(|t| t.s_j));
    let raw_bound = if r_b > 0.0 {
        1.0 - mean_gap / (2.0 * r_b) - 0.5 * best_s
    } else {
        // Every pooled sample sits at the origin: both sides are the same
        // point mass.
        1.0
    };
    Ok(BoundReport {
        raw_bound,
        clamped_bound: raw_bound.clamp(0.0, 1.0),
        mean_gap,
        r_b,
        per_g,
        best_g,
    })
}

/// Lower bound on the subset variation distance over `A(g)`:
/// `|E+[g] - E-[g]| / 2`.
pub fn delta_a_lower_bound(pos: &SampleSet, neg: &SampleSet, g: &ConditionFunction) -> Result<f64> {
    pos.check_compatible(neg)?;
    Ok(0.5 * (acceptance_rate(pos, g) - acceptance_rate(neg, g)).abs())
}

/// Index and value of the first maximum.
pub(crate) fn argmax_first(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}
