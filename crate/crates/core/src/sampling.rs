//! Seeded sample generation for the hypothesis checkers.
//!
//! Points are drawn uniformly from a box or from a finite point list and
//! rejection-filtered by whatever edge condition the caller needs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Draws allowed per requested sample before rejection sampling gives up.
pub const ATTEMPTS_PER_SAMPLE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// Axis-aligned box `lower[i] ≤ p[i] ≤ upper[i]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// A user-supplied finite point list, sampled uniformly with replacement.
    Points { points: Vec<Point> },
}

impl Region {
    pub fn dim(&self) -> Option<usize> {
        match self {
            Region::Box { lower, .. } => Some(lower.len()),
            Region::Points { points } => points.first().map(Point::dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub region: Region,
    /// Number of accepted samples requested.
    pub count: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn uniform_box(lower: Vec<f64>, upper: Vec<f64>, count: usize, seed: u64) -> Self {
        SampleSpec {
            region: Region::Box { lower, upper },
            count,
            seed,
        }
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64, count: usize, seed: u64) -> Self {
        Self::uniform_box(vec![lo; dim], vec![hi; dim], count, seed)
    }

    pub fn from_points(points: Vec<Point>, count: usize, seed: u64) -> Self {
        SampleSpec {
            region: Region::Points { points },
            count,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn dim(&self) -> Result<usize> {
        self.region
            .dim()
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::InvalidInput("sample region is empty".into()))
    }

    pub(crate) fn sampler(&self) -> Result<Sampler<'_>> {
        let dim = self.dim()?;
        match &self.region {
            Region::Box { lower, upper } => {
                if upper.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: upper.len(),
                    });
                }
                for (lo, hi) in lower.iter().zip(upper) {
                    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                        return Err(Error::InvalidInput(format!(
                            "invalid sample interval [{lo}, {hi}]"
                        )));
                    }
                }
            }
            Region::Points { points } => {
                for p in points {
                    p.expect_dim(dim)?;
                }
            }
        }
        Ok(Sampler {
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            region: &self.region,
        })
    }

    /// Repeatedly calls `propose` until `count` samples are accepted or the
    /// attempt budget runs out. Fails only if nothing was accepted.
    pub(crate) fn collect<T>(
        &self,
        mut propose: impl FnMut(&mut Sampler<'_>) -> Result<Option<T>>,
    ) -> Result<Vec<T>> {
        if self.count == 0 {
            return Err(Error::InsufficientSamples("sample count is zero".into()));
        }
        let mut sampler = self.sampler()?;
        let budget = self.count.saturating_mul(ATTEMPTS_PER_SAMPLE);
        let mut accepted = Vec::with_capacity(self.count);
        for _ in 0..budget {
            if accepted.len() == self.count {
                break;
            }
            if let Some(sample) = propose(&mut sampler)? {
                accepted.push(sample);
            }
        }
        if accepted.is_empty() {
            return Err(Error::InsufficientSamples(format!(
                "no sample satisfied the edge condition in {budget} draws"
            )));
        }
        Ok(accepted)
    }
}

pub(crate) struct Sampler<'a> {
    rng: ChaCha8Rng,
    region: &'a Region,
}

impl Sampler<'_> {
    pub(crate) fn point(&mut self) -> Point {
        match self.region {
            Region::Box { lower, upper } => Point::new(
                lower
                    .iter()
                    .zip(upper)
                    .map(|(&lo, &hi)| self.rng.random_range(lo..=hi))
                    .collect(),
            ),
            Region::Points { points } => {
                let i = self.rng.random_range(0..points.len());
                points[i].clone()
            }
        }
    }
}
