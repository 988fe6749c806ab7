//! Accuracy ceilings under domain shift.
//!
//! A model with accuracy `p` on the training distribution `D` and `q` on the
//! shifted part of a test distribution `D*` has overall accuracy
//! `(p - q) eta(D, D*) + q`. Replacing the overlap by its estimated upper bound
//! gives a ceiling. For a poisoned mixture `D* = sigma D + (1 - sigma) D_p`
//! with `q = 0`, means and acceptance rates are affine in `sigma`, which gives
//! the closed form in [`backdoor_ceiling`].

use serde::Serialize;

use crate::bound::compute_bound;
use crate::condition::ConditionFunction;
use crate::error::{Error, Result};
use crate::sample::SampleSet;

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::input(format!("{name} must lie in [0, 1], got {v}")))
    }
}

#[derive(Debug, Clone)]
pub struct ShiftInputs {
    pub train: SampleSet,
    pub test: SampleSet,
    /// Accuracy on the training distribution.
    pub p: f64,
    /// Accuracy on the part of the test distribution not shared with training.
    pub q: f64,
    pub gs: Vec<ConditionFunction>,
}

/// `(p - q) * rawBound(train, test) + q`, with the bound left unclamped.
pub fn accuracy_ceiling(inputs: &ShiftInputs) -> Result<f64> {
    check_unit("p", inputs.p)?;
    check_unit("q", inputs.q)?;
    let bound = compute_bound(&inputs.train, &inputs.test, &inputs.gs)?;
    Ok((inputs.p - inputs.q) * bound.raw_bound + inputs.q)
}

/// Clean and poisoned components of a test mixture.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    pub clean: SampleSet,
    pub poisoned: SampleSet,
    /// Purity ratio: fraction of clean samples in the mixture.
    pub sigma: f64,
}

impl MixtureSpec {
    pub fn new(clean: SampleSet, poisoned: SampleSet, sigma: f64) -> Result<Self> {
        check_unit("sigma", sigma)?;
        clean.check_compatible(&poisoned)?;
        Ok(Self {
            clean,
            poisoned,
            sigma,
        })
    }

    /// Sizes of the clean and poisoned parts of an `n`-sample mixture:
    /// `floor(sigma n)` clean, the rest poisoned.
    pub fn split(&self, n: usize) -> (usize, usize) {
        let clean = ((self.sigma * n as f64).floor() as usize).min(n);
        (clean, n - clean)
    }

    /// Largest mixture size both components can supply.
    pub fn max_size(&self) -> usize {
        let (c, p) = (self.clean.len(), self.poisoned.len());
        if self.sigma == 1.0 {
            return c;
        }
        if self.sigma == 0.0 {
            return p;
        }
        let mut n = (((c + 1) as f64 / self.sigma).ceil() as usize)
            .min(((p + 1) as f64 / (1.0 - self.sigma)).ceil() as usize + 1);
        while n > 0 {
            let (nc, np) = self.split(n);
            if nc <= c && np <= p {
                break;
            }
            n -= 1;
        }
        n
    }

    /// The first `floor(sigma n)` clean rows followed by the first remaining
    /// poisoned rows.
    pub fn compose(&self, n: usize) -> Result<SampleSet> {
        let (nc, np) = self.split(n);
        if n == 0 || nc > self.clean.len() || np > self.poisoned.len() {
            return Err(Error::input(format!(
                "cannot compose {n} samples ({nc} clean, {np} poisoned) from {} clean and {} poisoned",
                self.clean.len(),
                self.poisoned.len()
            )));
        }
        let d = self.clean.dim();
        let mut data = Vec::with_capacity(n * d);
        data.extend_from_slice(&self.clean.as_flat()[..nc * d]);
        data.extend_from_slice(&self.poisoned.as_flat()[..np * d]);
        SampleSet::from_flat(data, d, self.clean.norm_kind())
    }
}

/// Ceiling for a mixture with accuracy `p` on clean data and `q` on poisoned
/// data: `(p - q) (1 - (1 - sigma)(1 - rawBound(clean, poisoned))) + q`.
pub fn mixture_ceiling(mix: &MixtureSpec, p: f64, q: f64, gs: &[ConditionFunction]) -> Result<f64> {
    check_unit("p", p)?;
    check_unit("q", q)?;
    let raw = compute_bound(&mix.clean, &mix.poisoned, gs)?.raw_bound;
    Ok(ceiling_from_raw(raw, mix.sigma, p, q))
}

fn ceiling_from_raw(raw: f64, sigma: f64, p: f64, q: f64) -> f64 {
    // 1 - raw is the mean-gap term plus half the best predicate term.
    (p - q) * (1.0 - (1.0 - sigma) * (1.0 - raw)) + q
}

/// Backdoor case (`q = 0`):
/// `p (1 - (1-sigma)/(2 r_B) ||mu_D - mu_P|| - (1-sigma) max_g (r_B - r_A)/(2 r_B) |E_D[g] - E_P[g]|)`.
pub fn backdoor_ceiling(mix: &MixtureSpec, p: f64, gs: &[ConditionFunction]) -> Result<f64> {
    mixture_ceiling(mix, p, 0.0, gs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub sigma: f64,
    pub ceiling: f64,
}

/// Evaluates the mixture ceiling for each purity ratio, sorted by `sigma`.
pub fn sweep_sigma(
    clean: &SampleSet,
    poisoned: &SampleSet,
    p: f64,
    q: f64,
    sigmas: &[f64],
    gs: &[ConditionFunction],
) -> Result<Vec<SweepPoint>> {
    check_unit("p", p)?;
    check_unit("q", q)?;
    for &s in sigmas {
        check_unit("sigma", s)?;
    }
    let raw = compute_bound(clean, poisoned, gs)?.raw_bound;
    let mut sorted = sigmas.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted
        .into_iter()
        .map(|sigma| SweepPoint {
            sigma,
            ceiling: ceiling_from_raw(raw, sigma, p, q),
        })
        .collect())
}

/// Purity ratios `0, 0.1, ..., 1`.
pub fn default_sigmas() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Which component a mixture sample was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Clean,
    Poisoned,
}

/// A deterministic stand-in for a trained model: says whether it labels a
/// given mixture sample correctly.
pub trait LabelRule {
    /// `index` counts samples within their component.
    fn is_correct(&self, sample: &[f64], origin: Origin, index: usize) -> bool;
}

/// Correct on a fixed fraction of each component, spread evenly over sample
/// indices with a golden-ratio sequence.
#[derive(Debug, Clone, Copy)]
pub struct RateRule {
    pub clean_accuracy: f64,
    pub poisoned_accuracy: f64,
}

impl LabelRule for RateRule {
    fn is_correct(&self, _sample: &[f64], origin: Origin, index: usize) -> bool {
        const PHI_FRAC: f64 = 0.618_033_988_749_894_9;
        let u = ((index as f64 + 1.0) * PHI_FRAC).fract();
        match origin {
            Origin::Clean => u < self.clean_accuracy,
            Origin::Poisoned => u < self.poisoned_accuracy,
        }
    }
}

/// Accuracy of `rule` on the `n`-sample composition of `mix`.
pub fn simulate_accuracy(mix: &MixtureSpec, n: usize, rule: &impl LabelRule) -> Result<f64> {
    let (nc, np) = mix.split(n);
    if n == 0 || nc > mix.clean.len() || np > mix.poisoned.len() {
        return Err(Error::input(format!(
            "cannot compose {n} samples from {} clean and {} poisoned",
            mix.clean.len(),
            mix.poisoned.len()
        )));
    }
    let clean_hits = (0..nc)
        .filter(|&i| rule.is_correct(mix.clean.row(i), Origin::Clean, i))
        .count();
    let poisoned_hits = (0..np)
        .filter(|&i| rule.is_correct(mix.poisoned.row(i), Origin::Poisoned, i))
        .count();
    Ok((clean_hits + poisoned_hits) as f64 / n as f64)
}
