//! Finite real vectors and the norms the bound is measured in.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Norm used for radii, mean gaps, and domain sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    #[default]
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::LInf];

    /// Norm of a raw coordinate slice. Callers guarantee finiteness.
    #[inline]
    pub fn of(self, coords: &[f64]) -> f64 {
        match self {
            NormKind::L1 => coords.iter().map(|c| c.abs()).sum(),
            NormKind::L2 => coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
            NormKind::LInf => coords.iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }

    /// Norm of `a - b` without allocating the difference.
    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let diffs = a.iter().zip(b).map(|(x, y)| x - y);
        match self {
            NormKind::L1 => diffs.map(f64::abs).sum(),
            NormKind::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            NormKind::LInf => diffs.fold(0.0, |m, d| m.max(d.abs())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" | "l-inf" | "inf" => Ok(NormKind::LInf),
            other => Err(Error::input(format!(
                "unknown norm `{other}` (expected l1, l2 or linf)"
            ))),
        }
    }
}

/// An immutable point in d-dimensional space with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector(Box<[f64]>);

impl Vector {
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords: Vec<f64> = coords.into();
        if coords.is_empty() {
            return Err(Error::input("vector must have at least one coordinate"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::input(format!(
                "coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Vector(coords.into_boxed_slice()))
    }

    /// One-dimensional vector, used for score-space computations.
    pub fn scalar(value: f64) -> Result<Self> {
        Vector::new(vec![value])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        kind.of(&self.0)
    }

    pub fn distance(&self, other: &Vector, kind: NormKind) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(kind.distance(&self.0, &other.0))
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Vector::new(coords).map_err(serde::de::Error::custom)
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Norm of a vector given as raw coordinates; rejects non-finite input.
pub fn norm(coords: &[f64], kind: NormKind) -> Result<f64> {
    if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
        return Err(Error::input(format!("non-finite coordinate {c}")));
    }
    Ok(kind.of(coords))
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}

/// Coordinate-wise mean with compensated accumulation in index order.
pub(crate) fn mean_of<'a, I>(dim: usize, points: I) -> Vec<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut acc = vec![NeumaierSum::new(); dim];
    let mut count = 0usize;
    for p in points {
        for (a, &c) in acc.iter_mut().zip(p) {
            a.add(c);
        }
        count += 1;
    }
    acc.iter().map(|a| a.total() / count as f64).collect()
}
