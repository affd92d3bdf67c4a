//! Finite point sets and the Pompeiu–Hausdorff distance between them.
//!
//! Set-valued images are finite, so every infimum below is a minimum and
//! every supremum a maximum. That makes the distances exact: no ε slack is
//! needed to pick a near point.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::point::Point;

/// Nonempty finite set of points in insertion order, without duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct FiniteSet {
    points: Vec<Point>,
}

impl FiniteSet {
    /// Builds a set, collapsing points that compare equal coordinate by
    /// coordinate. The first occurrence keeps its position.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("finite set is empty".into()));
        };
        let dim = first.dim();
        let mut seen = HashSet::with_capacity(points.len());
        let mut unique = Vec::with_capacity(points.len());
        for p in points {
            p.expect_dim(dim)?;
            if seen.insert(p.key()) {
                unique.push(p);
            }
        }
        Ok(FiniteSet { points: unique })
    }

    pub fn singleton(p: Point) -> Self {
        FiniteSet { points: vec![p] }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn contains(&self, p: &Point) -> bool {
        let key = p.key();
        self.points.iter().any(|q| q.key() == key)
    }
}

impl TryFrom<Vec<Point>> for FiniteSet {
    type Error = Error;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        FiniteSet::new(points)
    }
}

impl From<FiniteSet> for Vec<Point> {
    fn from(set: FiniteSet) -> Self {
        set.points
    }
}

/// Index and distance of the point of `set` nearest to `a`. Ties go to the
/// lowest index.
pub(crate) fn nearest(space: &MetricSpace, a: &Point, set: &FiniteSet) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, b) in set.points.iter().enumerate() {
        let d = space.distance_unchecked(a, b);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// `d(a, B) = min_{b ∈ B} d(a, b)`.
pub fn dist_to_set(space: &MetricSpace, a: &Point, set: &FiniteSet) -> Result<f64> {
    space.check_point(a)?;
    space.check_point(&set.points[0])?;
    Ok(nearest(space, a, set).1)
}

/// `max_{a ∈ A} d(a, B)`.
pub fn excess(space: &MetricSpace, a: &FiniteSet, b: &FiniteSet) -> Result<f64> {
    space.check_point(&a.points[0])?;
    space.check_point(&b.points[0])?;
    Ok(a.points
        .iter()
        .map(|p| nearest(space, p, b).1)
        .fold(0.0, f64::max))
}

/// Pompeiu–Hausdorff distance: the larger of the two one-sided excesses.
pub fn hausdorff(space: &MetricSpace, a: &FiniteSet, b: &FiniteSet) -> Result<f64> {
    Ok(excess(space, a, b)?.max(excess(space, b, a)?))
}

/// For `a ∈ A`, a point `b ∈ B` with `d(a, b) ≤ H(A, B) + eps`.
///
/// The returned point is the nearest point of `B` to `a` (lowest index on
/// ties), so in fact `d(a, b) = d(a, B) ≤ H(A, B)`. `eps` only has to be
/// positive; it never needs to be spent on finite sets.
pub fn select_near(
    space: &MetricSpace,
    a_set: &FiniteSet,
    b_set: &FiniteSet,
    a: &Point,
    eps: f64,
) -> Result<Point> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    space.check_point(a)?;
    space.check_point(&b_set.points[0])?;
    if !a_set.contains(a) {
        return Err(Error::InvalidInput(format!("{a} is not a member of A")));
    }
    let (i, _) = nearest(space, a, b_set);
    Ok(b_set.points[i].clone())
}
