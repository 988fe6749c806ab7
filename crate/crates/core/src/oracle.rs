//! Exact overlap, total variation, and bound right-hand sides on finite
//! discrete distributions.
//!
//! On a finite support every integral reduces to a sum, so these quantities
//! are exact up to floating-point round-off. They serve as ground truth for
//! the sample-based estimators.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::condition::ConditionFunction;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, NeumaierSum};
use crate::vector::{check_dim, NormKind, Vector};

/// Tolerance on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability distribution on finitely many distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    support: Vec<Vector>,
    masses: Vec<f64>,
}

/// Exact-identity key for a point; `-0.0` and `0.0` compare equal.
fn point_key(p: &[f64]) -> Vec<u64> {
    p.iter()
        .map(|&c| if c == 0.0 { 0u64 } else { c.to_bits() })
        .collect()
}

impl DiscreteDistribution {
    pub fn new(support: Vec<Vector>, masses: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::input(
                "distribution needs at least one support point",
            ));
        }
        if support.len() != masses.len() {
            return Err(Error::input(format!(
                "{} support points but {} masses",
                support.len(),
                masses.len()
            )));
        }
        let dim = support[0].dim();
        for p in &support {
            check_dim(dim, p.dim())?;
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::input(format!("invalid probability mass {m}")));
        }
        let total = compensated_sum(masses.iter().copied());
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::input(format!("masses sum to {total}, not 1")));
        }
        let mut seen = HashMap::with_capacity(support.len());
        for (i, p) in support.iter().enumerate() {
            if let Some(j) = seen.insert(point_key(p.coords()), i) {
                return Err(Error::input(format!("support points {j} and {i} coincide")));
            }
        }
        Ok(Self { support, masses })
    }

    /// Distribution with masses proportional to positive integer counts.
    pub fn from_counts(support: Vec<Vector>, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::input("counts sum to zero"));
        }
        let masses = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Self::new(support, masses)
    }

    pub fn dim(&self) -> usize {
        self.support[0].dim()
    }

    pub fn support(&self) -> &[Vector] {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Mass-weighted mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut acc = vec![NeumaierSum::new(); self.dim()];
        for (p, &m) in self.support.iter().zip(&self.masses) {
            for (a, &c) in acc.iter_mut().zip(p.coords()) {
                a.add(m * c);
            }
        }
        acc.iter().map(NeumaierSum::total).collect()
    }

    /// Expectation of a condition function.
    pub fn expectation(&self, g: &ConditionFunction) -> f64 {
        compensated_sum(
            self.support
                .iter()
                .zip(&self.masses)
                .filter(|(p, _)| g.holds(p.coords()))
                .map(|(_, &m)| m),
        )
    }

    pub fn to_json(&self) -> DistributionFile {
        DistributionFile {
            dimension: self.dim(),
            points: self.support.iter().map(|p| p.coords().to_vec()).collect(),
            masses: self.masses.clone(),
        }
    }
}

/// On-disk form: `{ "dimension": d, "points": [[...], ...], "masses": [...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
}

impl TryFrom<DistributionFile> for DiscreteDistribution {
    type Error = Error;

    fn try_from(file: DistributionFile) -> Result<Self> {
        let support = file
            .points
            .into_iter()
            .map(|p| {
                let v = Vector::new(p)?;
                check_dim(file.dimension, v.dim())?;
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteDistribution::new(support, file.masses)
    }
}

/// Union of two supports with the mass each distribution puts on every point.
#[derive(Debug, Clone)]
pub struct JointSupport {
    pub points: Vec<Vector>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl JointSupport {
    /// Points of `p` in order, followed by points only `q` carries.
    pub fn new(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<Self> {
        check_dim(p.dim(), q.dim())?;
        let mut index = HashMap::with_capacity(p.support.len() + q.support.len());
        let mut points = Vec::with_capacity(p.support.len() + q.support.len());
        let mut pm = Vec::with_capacity(points.capacity());
        let mut qm = Vec::with_capacity(points.capacity());
        for (x, &m) in p.support.iter().zip(&p.masses) {
            index.insert(point_key(x.coords()), points.len());
            points.push(x.clone());
            pm.push(m);
            qm.push(0.0);
        }
        for (x, &m) in q.support.iter().zip(&q.masses) {
            match index.get(&point_key(x.coords())) {
                Some(&i) => qm[i] = m,
                None => {
                    points.push(x.clone());
                    pm.push(0.0);
                    qm.push(m);
                }
            }
        }
        Ok(Self {
            points,
            p: pm,
            q: qm,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest norm over the points selected by `mask` (0 if none).
    fn max_norm(&self, mask: &[bool], norm: NormKind) -> f64 {
        self.points
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(x, _)| x.norm(norm))
            .fold(0.0, f64::max)
    }
}

/// A region of the joint support.
#[derive(Debug, Clone)]
pub enum SubsetSpec {
    /// Indices into [`JointSupport::points`].
    Members(Vec<usize>),
    Condition(ConditionFunction),
}

impl SubsetSpec {
    pub fn membership(&self, joint: &JointSupport) -> Result<Vec<bool>> {
        match self {
            SubsetSpec::Members(idx) => {
                let mut mask = vec![false; joint.len()];
                for &i in idx {
                    *mask.get_mut(i).ok_or_else(|| {
                        Error::input(format!(
                            "subset index {i} outside joint support of size {}",
                            joint.len()
                        ))
                    })? = true;
                }
                Ok(mask)
            }
            SubsetSpec::Condition(g) => {
                if let ConditionFunction::ScoreThreshold { scorer, .. } = g {
                    if let Some(x) = joint.points.first() {
                        check_dim(scorer.dimension(), x.dim())?;
                    }
                }
                Ok(joint.points.iter().map(|x| g.holds(x.coords())).collect())
            }
        }
    }

    /// The complementary region, as explicit members.
    pub fn complement(&self, joint: &JointSupport) -> Result<SubsetSpec> {
        let mask = self.membership(joint)?;
        Ok(SubsetSpec::Members(
            mask.iter()
                .enumerate()
                .filter(|(_, &m)| !m)
                .map(|(i, _)| i)
                .collect(),
        ))
    }
}

/// Overlap index: sum of pointwise minima of the two mass functions.
pub fn exact_overlap(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    let joint = JointSupport::new(p, q)?;
    Ok(compensated_sum(
        joint.p.iter().zip(&joint.q).map(|(a, b)| a.min(*b)),
    ))
}

/// Total variation distance: half the L1 distance between mass functions.
pub fn exact_tv(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    let joint = JointSupport::new(p, q)?;
    Ok(half_abs_diff(&joint, &vec![true; joint.len()]))
}

/// Variation distance restricted to the region `a`.
pub fn exact_delta_a(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    a: &SubsetSpec,
) -> Result<f64> {
    let joint = JointSupport::new(p, q)?;
    let mask = a.membership(&joint)?;
    Ok(half_abs_diff(&joint, &mask))
}

fn half_abs_diff(joint: &JointSupport, mask: &[bool]) -> f64 {
    0.5 * compensated_sum(
        joint
            .p
            .iter()
            .zip(&joint.q)
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|((a, b), _)| (a - b).abs()),
    )
}

/// Which radius normalizes the region-based bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusForm {
    /// Largest norm over the complement of the region.
    Complement,
    /// Largest norm over the whole domain.
    Domain,
}

/// Right-hand side of the region-based overlap bound
/// `1 - ||mu_P - mu_Q|| / (2 r) - (r - r_A) / r * delta_A`, with exact means,
/// radii and `delta_A`.
pub fn theorem_rhs(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    a: &SubsetSpec,
    form: RadiusForm,
    norm: NormKind,
) -> Result<f64> {
    let joint = JointSupport::new(p, q)?;
    let mask = a.membership(&joint)?;
    let r_a = joint.max_norm(&mask, norm);
    let r_denom = match form {
        RadiusForm::Complement => {
            let comp: Vec<bool> = mask.iter().map(|m| !m).collect();
            joint.max_norm(&comp, norm)
        }
        RadiusForm::Domain => joint.max_norm(&vec![true; joint.len()], norm),
    };
    if r_denom <= 0.0 {
        return Err(Error::DegenerateDomain(
            "normalizing radius is zero; the overlap is 1 when both distributions sit at the origin"
                .into(),
        ));
    }
    let gap = norm.distance(&p.mean(), &q.mean());
    let delta_a = half_abs_diff(&joint, &mask);
    Ok(1.0 - gap / (2.0 * r_denom) - (r_denom - r_a) / r_denom * delta_a)
}

/// The predicate-family bound evaluated with exact expectations:
/// `1 - ||mu_P - mu_Q|| / (2 r_B) - max_g (r_B - r_A(g)) / (2 r_B) |E_P[g] - E_Q[g]|`.
pub fn corollary_rhs_exact(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    gs: &[ConditionFunction],
    norm: NormKind,
) -> Result<f64> {
    if gs.is_empty() {
        return Err(Error::input("at least one condition function is required"));
    }
    let joint = JointSupport::new(p, q)?;
    let r_b = joint.max_norm(&vec![true; joint.len()], norm);
    if r_b <= 0.0 {
        return Err(Error::DegenerateDomain(
            "domain radius is zero; the overlap is 1 when both distributions sit at the origin"
                .into(),
        ));
    }
    let gap = norm.distance(&p.mean(), &q.mean());
    let mut best = f64::NEG_INFINITY;
    for g in gs {
        let mask = SubsetSpec::Condition(g.clone()).membership(&joint)?;
        let r_a = joint.max_norm(&mask, norm);
        let e_p = compensated_sum(
            joint
                .p
                .iter()
                .zip(&mask)
                .filter(|(_, &m)| m)
                .map(|(x, _)| *x),
        );
        let e_q = compensated_sum(
            joint
                .q
                .iter()
                .zip(&mask)
                .filter(|(_, &m)| m)
                .map(|(x, _)| *x),
        );
        best = best.max((r_b - r_a) / (2.0 * r_b) * (e_p - e_q).abs());
    }
    Ok(1.0 - gap / (2.0 * r_b) - best)
}
