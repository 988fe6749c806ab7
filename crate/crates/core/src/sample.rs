//! Finite sample sets, the empirical stand-ins for the two distributions.

use crate::error::{Error, Result};
use crate::vector::{check_dim, mean_of, NormKind, Vector};

/// A nonempty set of same-dimension samples under a fixed norm.
///
/// Rows are stored contiguously. The per-row norms, the maximum norm, and the
/// coordinate-wise mean are computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    data: Vec<f64>,
    dim: usize,
    norm: NormKind,
    norms: Vec<f64>,
    max_norm: f64,
    mean: Vec<f64>,
}

impl SampleSet {
    pub fn new(samples: Vec<Vector>, norm: NormKind) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::input("sample set must not be empty"))?;
        let dim = first.dim();
        let mut data = Vec::with_capacity(samples.len() * dim);
        for s in &samples {
            check_dim(dim, s.dim())?;
            data.extend_from_slice(s.coords());
        }
        Ok(Self::build(data, dim, norm))
    }

    /// Builds a set from row-major coordinates.
    pub fn from_flat(data: Vec<f64>, dim: usize, norm: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        if data.is_empty() {
            return Err(Error::input("sample set must not be empty"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::input(format!(
                "{} values do not form rows of dimension {dim}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|c| !c.is_finite()) {
            return Err(Error::input(format!(
                "sample {} coordinate {} is not finite",
                i / dim,
                i % dim
            )));
        }
        Ok(Self::build(data, dim, norm))
    }

    /// Convenience constructor for one-dimensional data.
    pub fn from_scalars(values: &[f64], norm: NormKind) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1, norm)
    }

    fn build(data: Vec<f64>, dim: usize, norm: NormKind) -> Self {
        let norms: Vec<f64> = data.chunks_exact(dim).map(|r| norm.of(r)).collect();
        let max_norm = norms.iter().copied().fold(0.0, f64::max);
        let mean = mean_of(dim, data.chunks_exact(dim));
        Self {
            data,
            dim,
            norm,
            norms,
            max_norm,
            mean,
        }
    }

    /// Same samples measured under a different norm.
    pub fn with_norm(&self, norm: NormKind) -> Self {
        if norm == self.norm {
            return self.clone();
        }
        Self::build(self.data.clone(), self.dim, norm)
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn vectors(&self) -> impl Iterator<Item = Vector> + '_ {
        self.rows()
            .map(|r| Vector::new(r.to_vec()).expect("rows are validated"))
    }

    /// Norm of every row, in order.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn max_norm(&self) -> f64 {
        self.max_norm
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// First `count` rows as a new set.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.len() {
            return Err(Error::input(format!(
                "prefix of {count} rows requested from a set of {}",
                self.len()
            )));
        }
        Ok(Self::build(
            self.data[..count * self.dim].to_vec(),
            self.dim,
            self.norm,
        ))
    }

    /// Checks that `other` can be compared against this set.
    pub fn check_compatible(&self, other: &SampleSet) -> Result<()> {
        check_dim(self.dim, other.dim)?;
        if self.norm != other.norm {
            return Err(Error::Contract(format!(
                "sample sets use different norms ({} vs {})",
                self.norm, other.norm
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caches_mean_and_max_norm() {
        let s = SampleSet::from_flat(vec![3.0, 4.0, -1.0, 0.0], 2, NormKind::L2).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.max_norm(), 5.0);
        assert_eq!(s.mean(), &[1.0, 2.0]);
        assert_eq!(s.norms(), &[5.0, 1.0]);
        assert_eq!(s.with_norm(NormKind::L1).max_norm(), 7.0);
    }

    #[test]
    fn rejects_empty_ragged_and_mixed_dims() {
        assert!(SampleSet::new(vec![], NormKind::L2).is_err());
        assert!(SampleSet::from_flat(vec![1.0, 2.0, 3.0], 2, NormKind::L2).is_err());
        let a = Vector::new(vec![1.0]).unwrap();
        let b = Vector::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            SampleSet::new(vec![a, b], NormKind::L2),
            Err(Error::Dimension {
                expected: 1,
                actual: 2
            })
        ));
    }

    #[test]
    fn compatibility_checks_norm() {
        let a = SampleSet::from_scalars(&[1.0], NormKind::L2).unwrap();
        let b = SampleSet::from_scalars(&[1.0], NormKind::L1).unwrap();
        assert!(matches!(a.check_compatible(&b), Err(Error::Contract(_))));
    }
}
