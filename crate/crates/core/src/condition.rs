//! Condition functions: binary predicates that carve the domain into a
//! region `A(g) = {x : g(x) = 1}` and its complement.

use std::sync::Arc;

use crate::classifier::FittedScorer;
use crate::error::{Error, Result};
use crate::vector::{check_dim, NormKind, Vector};

#[derive(Debug, Clone)]
pub enum ConditionFunction {
    /// `1{ ||x|| <= radius }`, a closed ball around the origin.
    RadiusIndicator { radius: f64, norm: NormKind },
    /// `1{ s(x) <= threshold }` where `s` is the clamped confidence score of a
    /// fitted scorer.
    ScoreThreshold {
        threshold: f64,
        scorer: Arc<FittedScorer>,
    },
}

impl ConditionFunction {
    pub fn radius(radius: f64, norm: NormKind) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::input(format!(
                "radius must be finite and nonnegative, got {radius}"
            )));
        }
        Ok(ConditionFunction::RadiusIndicator { radius, norm })
    }

    pub fn score_threshold(threshold: f64, scorer: Arc<FittedScorer>) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::input(format!(
                "score threshold must lie in [0, 1], got {threshold}"
            )));
        }
        Ok(ConditionFunction::ScoreThreshold { threshold, scorer })
    }

    /// Evaluates the predicate, returning exactly 0 or 1.
    pub fn evaluate(&self, x: &Vector) -> Result<u8> {
        if let ConditionFunction::ScoreThreshold { scorer, .. } = self {
            check_dim(scorer.dimension(), x.dim())?;
        }
        Ok(u8::from(self.holds(x.coords())))
    }

    /// Predicate on raw coordinates; dimensions are the caller's concern.
    #[inline]
    pub fn holds(&self, x: &[f64]) -> bool {
        match self {
            ConditionFunction::RadiusIndicator { radius, norm } => norm.of(x) <= *radius,
            ConditionFunction::ScoreThreshold { threshold, scorer } => {
                scorer.raw_score(x).clamp(0.0, 1.0) <= *threshold
            }
        }
    }

    /// Like [`holds`](Self::holds) but reuses a norm already computed under
    /// `kind` when the predicate is a ball in that same norm.
    #[inline]
    pub(crate) fn holds_given_norm(&self, x: &[f64], kind: NormKind, x_norm: f64) -> bool {
        match self {
            ConditionFunction::RadiusIndicator { radius, norm } if *norm == kind => {
                x_norm <= *radius
            }
            _ => self.holds(x),
        }
    }

    /// The radius or threshold parameterizing this predicate.
    pub fn parameter(&self) -> f64 {
        match self {
            ConditionFunction::RadiusIndicator { radius, .. } => *radius,
            ConditionFunction::ScoreThreshold { threshold, .. } => *threshold,
        }
    }
}

/// Radii `r_j = (j / k) * r_max` for `j = 1..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusFamily {
    radii: Vec<f64>,
}

impl RadiusFamily {
    pub const DEFAULT_K: usize = 50;

    /// A zero `r_max` yields `k` zero radii; callers treat that as a
    /// degenerate domain.
    pub fn new(k: usize, r_max: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("k must be at least 1"));
        }
        if !(r_max.is_finite() && r_max >= 0.0) {
            return Err(Error::input(format!(
                "maximum radius must be finite and nonnegative, got {r_max}"
            )));
        }
        let radii = (1..=k)
            .map(|j| {
                if j == k {
                    r_max
                } else {
                    j as f64 / k as f64 * r_max
                }
            })
            .collect();
        Ok(Self { radii })
    }

    pub fn k(&self) -> usize {
        self.radii.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn indicators(&self, norm: NormKind) -> Vec<ConditionFunction> {
        self.radii
            .iter()
            .map(|&radius| ConditionFunction::RadiusIndicator { radius, norm })
            .collect()
    }
}
