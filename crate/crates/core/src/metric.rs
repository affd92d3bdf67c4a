//! Metric spaces over real coordinate vectors.
//!
//! Builtin metrics are the Euclidean metric (which is `|x - y|` on the real
//! line) and the Chebyshev (max) metric. Anything else can be plugged in as a
//! distance callback; the callback is trusted to satisfy the metric axioms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::Point;

pub type DistanceFn = dyn Fn(&Point, &Point) -> f64 + Send + Sync;

#[derive(Clone)]
enum MetricKind {
    Euclidean,
    Chebyshev,
    Custom(Arc<DistanceFn>),
}

#[derive(Clone)]
pub struct MetricSpace {
    dim: usize,
    kind: MetricKind,
}

impl MetricSpace {
    /// `(ℝ, |·|)`.
    pub fn real_line() -> Self {
        MetricSpace {
            dim: 1,
            kind: MetricKind::Euclidean,
        }
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::with_kind(dim, MetricKind::Euclidean)
    }

    pub fn chebyshev(dim: usize) -> Result<Self> {
        Self::with_kind(dim, MetricKind::Chebyshev)
    }

    pub fn custom<F>(dim: usize, distance: F) -> Result<Self>
    where
        F: Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    {
        Self::with_kind(dim, MetricKind::Custom(Arc::new(distance)))
    }

    fn with_kind(dim: usize, kind: MetricKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "space dimension must be positive".into(),
            ));
        }
        Ok(MetricSpace { dim, kind })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Chebyshev => "chebyshev",
            MetricKind::Custom(_) => "custom",
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        p.expect_dim(self.dim)
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    pub(crate) fn distance_unchecked(&self, p: &Point, q: &Point) -> f64 {
        let (a, b) = (p.coords(), q.coords());
        match &self.kind {
            MetricKind::Euclidean => euclidean(a, b),
            MetricKind::Chebyshev => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            MetricKind::Custom(f) => f(p, q),
        }
    }
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpace")
            .field("kind", &self.name())
            .field("dim", &self.dim)
            .finish()
    }
}

/// Scaled two-norm of `a - b`. Scaling by the largest component keeps tiny
/// but nonzero differences from squaring down to zero.
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    if let ([x], [y]) = (a, b) {
        return (x - y).abs();
    }
    let scale = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let r = (x - y) / scale;
            r * r
        })
        .sum();
    scale * sum.sqrt()
}
