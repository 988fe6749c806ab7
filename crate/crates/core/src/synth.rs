//! Seeded synthetic data. Every generator takes an explicit RNG so that a
//! single 64-bit seed reproduces a whole run.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::oracle::DiscreteDistribution;
use crate::sample::SampleSet;
use crate::vector::{NormKind, Vector};

/// Portable, seedable generator used throughout.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` draws from an isotropic Gaussian with the given center and standard
/// deviation.
pub fn gaussian_samples<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    center: &[f64],
    std_dev: f64,
    norm: NormKind,
) -> Result<SampleSet> {
    if !(std_dev.is_finite() && std_dev >= 0.0) {
        return Err(Error::input(format!(
            "invalid standard deviation {std_dev}"
        )));
    }
    let d = center.len();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        for &c in center {
            let z: f64 = rng.sample(StandardNormal);
            data.push(c + std_dev * z);
        }
    }
    SampleSet::from_flat(data, d, norm)
}

/// `n` i.i.d. draws from a discrete distribution.
pub fn sample_discrete<R: Rng + ?Sized>(
    rng: &mut R,
    dist: &DiscreteDistribution,
    n: usize,
    norm: NormKind,
) -> Result<SampleSet> {
    let index = WeightedIndex::new(dist.masses())
        .map_err(|e| Error::input(format!("cannot sample masses: {e}")))?;
    let d = dist.dim();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        data.extend_from_slice(dist.support()[index.sample(rng)].coords());
    }
    SampleSet::from_flat(data, d, norm)
}

/// Each support point repeated `counts[i]` times, in order.
pub fn replicate(support: &[Vector], counts: &[u64], norm: NormKind) -> Result<SampleSet> {
    let mut rows = Vec::new();
    for (p, &c) in support.iter().zip(counts) {
        for _ in 0..c {
            rows.push(p.clone());
        }
    }
    SampleSet::new(rows, norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_samples() {
        let a =
            gaussian_samples(&mut rng_from_seed(7), 50, &[0.0, 1.0], 1.0, NormKind::L2).unwrap();
        let b =
            gaussian_samples(&mut rng_from_seed(7), 50, &[0.0, 1.0], 1.0, NormKind::L2).unwrap();
        assert_eq!(a, b);
        let c =
            gaussian_samples(&mut rng_from_seed(8), 50, &[0.0, 1.0], 1.0, NormKind::L2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn discrete_sampling_frequencies() {
        let dist = DiscreteDistribution::new(
            vec![Vector::scalar(0.0).unwrap(), Vector::scalar(1.0).unwrap()],
            vec![0.25, 0.75],
        )
        .unwrap();
        let s = sample_discrete(&mut rng_from_seed(1), &dist, 20_000, NormKind::L2).unwrap();
        let ones = s.norms().iter().filter(|&&n| n == 1.0).count() as f64 / 20_000.0;
        assert!((ones - 0.75).abs() < 0.02);
    }
}
