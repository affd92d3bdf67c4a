use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the ground space, stored as a real coordinate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn scalar(value: f64) -> Self {
        Point(vec![value])
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Bit pattern of the coordinates with `-0.0` folded onto `0.0`, so that
    /// points equal under `==` share a key.
    pub(crate) fn key(&self) -> Vec<u64> {
        self.0
            .iter()
            .map(|&c| if c == 0.0 { 0u64 } else { c.to_bits() })
            .collect()
    }

    pub(crate) fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl From<f64> for Point {
    fn from(value: f64) -> Self {
        Point::scalar(value)
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point(coords)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(coords: [f64; N]) -> Self {
        Point(coords.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [c] = self.0.as_slice() {
            return write!(f, "{c}");
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A point of the product space `X × X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPoint {
    pub first: Point,
    pub second: Point,
}

impl PairPoint {
    pub fn new(first: Point, second: Point) -> Result<Self> {
        second.expect_dim(first.dim())?;
        Ok(PairPoint { first, second })
    }

    /// `(first, second)` becomes `(second, first)`.
    pub fn swapped(&self) -> PairPoint {
        PairPoint {
            first: self.second.clone(),
            second: self.first.clone(),
        }
    }
}

impl fmt::Display for PairPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.first, self.second)
    }
}
