//! Coupled Picard iteration.
//!
//! From a seed `(x₀, y₀)` the single-valued engine runs
//! `x_{n+1} = F(x_n, y_n)`, `y_{n+1} = F(y_n, x_n)`. Under the graph
//! contraction hypothesis with constant `k` the step sums
//! `S_n = d(x_n, x_{n+1}) + d(y_n, y_{n+1})` satisfy `S_n ≤ kⁿ S_0`, so the
//! iteration stops as soon as `k/(1-k) · S_n ≤ tol`, which bounds the summed
//! distance of `(x_{n+1}, y_{n+1})` to the limit by `tol`.
//!
//! The set-valued engine picks `x_{n+1} ∈ F(x_n, y_n)` among the points `b`
//! with `(x_n, b) ∈ E(G)`, nearest to `x_n`; symmetrically
//! `y_{n+1} ∈ F(y_n, x_n)` among `b` with `(b, y_n) ∈ E(G)`.

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, CertificateBuilder, Property, Violation};
use crate::checks::{validate_k, INEQUALITY_SLACK};
use crate::error::{Error, Result};
use crate::graph::{product_edge, Digraph};
use crate::map::{CoupledMap, CoupledMultiMap};
use crate::metric::MetricSpace;
use crate::point::{PairPoint, Point};
use crate::set::{dist_to_set, FiniteSet};

/// Which hypothesis justifies passing to the limit. The iteration is the
/// same either way; front ends use it to decide which certificate to demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Continuous,
    LimitClosure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub k: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub mode: Mode,
    /// Fail with [`Error::HypothesisViolation`] when a step breaks the
    /// geometric bound.
    pub check_bounds: bool,
    /// Record `(x_n, x_{n+1}) ∈ E` and `(y_{n+1}, y_n) ∈ E` per step.
    pub record_edges: bool,
}

impl SolveConfig {
    pub fn new(k: f64, tol: f64) -> Result<Self> {
        let cfg = SolveConfig {
            k,
            tol,
            max_iter: 10_000,
            mode: Mode::Continuous,
            check_bounds: false,
            record_edges: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn check_bounds(mut self, on: bool) -> Self {
        self.check_bounds = on;
        self
    }

    pub fn record_edges(mut self, on: bool) -> Self {
        self.record_edges = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_k(self.k)?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }

    /// `k/(1-k) · step_sum ≤ tol`.
    fn stop(&self, step_sum: f64) -> bool {
        self.k / (1.0 - self.k) * step_sum <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub x: Point,
    pub y: Point,
    /// `d(x_n, x_{n+1})`
    pub step_x: f64,
    /// `d(y_n, y_{n+1})`
    pub step_y: f64,
    /// `kⁿ/2 · D₀`, see [`step_bound`].
    pub bound: f64,
    pub edge_ok_x: Option<bool>,
    pub edge_ok_y: Option<bool>,
    /// `d(x_n, y_n)`
    pub diag: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub k: f64,
    pub steps: Vec<StepRecord>,
    /// `D₀ = d(x₀, x₁) + d(y₀, y₁)`
    pub d0: f64,
    pub converged: bool,
    /// Fixed-point defect of the returned pair: `d(F(x,y), x) + d(F(y,x), y)`,
    /// or `d(x, F(x,y)) + d(y, F(y,x))` for set-valued maps.
    pub residual: f64,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledFixedPoint {
    pub x: Point,
    pub y: Point,
    /// `d(x, y) ≤ tol`
    pub is_diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub fixed_point: CoupledFixedPoint,
    pub trace: IterationTrace,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.trace.converged
    }
}

fn validate_bound_args(k: f64, d0: f64) -> Result<()> {
    validate_k(k)?;
    if d0.is_nan() || d0 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "D0 must be nonnegative, got {d0}"
        )));
    }
    Ok(())
}

fn pow(k: f64, n: usize) -> f64 {
    k.powi(i32::try_from(n).unwrap_or(i32::MAX))
}

/// `kⁿ/2 · D₀`: bound on each of `d(x_n, x_{n+1})` and `d(y_n, y_{n+1})` for
/// `n ≥ 1`; their sum is bounded by twice this for every `n`.
pub fn step_bound(k: f64, d0: f64, n: usize) -> Result<f64> {
    validate_bound_args(k, d0)?;
    Ok(pow(k, n) / 2.0 * d0)
}

/// `kⁿ D₀ / (2(1-k))`, the geometric tail of [`step_bound`]. Bounds
/// `d(x_n, x*)` and `d(y_n, y*)` for `n ≥ 1`; for `n = 0` only their sum is
/// bounded, by twice this value.
pub fn tail_bound(k: f64, d0: f64, n: usize) -> Result<f64> {
    validate_bound_args(k, d0)?;
    Ok(pow(k, n) * d0 / (2.0 * (1.0 - k)))
}

struct Iterate<'a> {
    space: &'a MetricSpace,
    graph: &'a Digraph,
    cfg: &'a SolveConfig,
    d0: f64,
    steps: Vec<StepRecord>,
}

impl<'a> Iterate<'a> {
    fn new(space: &'a MetricSpace, graph: &'a Digraph, cfg: &'a SolveConfig, d0: f64) -> Self {
        Iterate {
            space,
            graph,
            cfg,
            d0,
            steps: Vec::new(),
        }
    }

    /// Records step `n` and returns its step sum.
    fn record(&mut self, x: &Point, y: &Point, nx: &Point, ny: &Point) -> Result<f64> {
        let n = self.steps.len();
        let step_x = self.space.distance(x, nx)?;
        let step_y = self.space.distance(y, ny)?;
        let (edge_ok_x, edge_ok_y) = if self.cfg.record_edges {
            (
                Some(self.graph.has_edge(x, nx)?),
                Some(self.graph.has_edge(ny, y)?),
            )
        } else {
            (None, None)
        };
        if self.cfg.check_bounds {
            let limit = pow(self.cfg.k, n) * self.d0;
            if step_x + step_y > limit + INEQUALITY_SLACK {
                return Err(Error::HypothesisViolation {
                    step: n,
                    quantity: "step_x + step_y",
                    lhs: step_x + step_y,
                    rhs: limit,
                });
            }
        }
        self.steps.push(StepRecord {
            n,
            x: x.clone(),
            y: y.clone(),
            step_x,
            step_y,
            bound: pow(self.cfg.k, n) / 2.0 * self.d0,
            edge_ok_x,
            edge_ok_y,
            diag: self.space.distance(x, y)?,
        });
        Ok(step_x + step_y)
    }

    fn finish(self, x: Point, y: Point, converged: bool, residual: f64) -> Result<Solution> {
        let is_diagonal = self.space.distance(&x, &y)? <= self.cfg.tol;
        Ok(Solution {
            fixed_point: CoupledFixedPoint { x, y, is_diagonal },
            trace: IterationTrace {
                k: self.cfg.k,
                steps: self.steps,
                d0: self.d0,
                converged,
                residual,
            },
        })
    }
}

/// Runs the coupled iteration from `(x0, y0)`.
///
/// The seed must satisfy `((x0, y0), (F(x0,y0), F(y0,x0)))` being a
/// product-graph edge. Running out of iterations is not an error: the
/// returned trace has `converged == false`.
pub fn solve_coupled<M: CoupledMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    graph: &Digraph,
    x0: &Point,
    y0: &Point,
    cfg: &SolveConfig,
) -> Result<Solution> {
    cfg.validate()?;
    space.check_point(x0)?;
    space.check_point(y0)?;

    let mut nx = map.eval(x0, y0)?;
    let mut ny = map.eval(y0, x0)?;
    let seed = PairPoint::new(x0.clone(), y0.clone())?;
    if !product_edge(graph, &seed, &PairPoint::new(nx.clone(), ny.clone())?)? {
        return Err(Error::SeedEdge);
    }
    let d0 = space.distance(x0, &nx)? + space.distance(y0, &ny)?;

    let mut it = Iterate::new(space, graph, cfg, d0);
    let (mut x, mut y) = (x0.clone(), y0.clone());
    let mut converged = false;
    while it.steps.len() < cfg.max_iter {
        let step_sum = it.record(&x, &y, &nx, &ny)?;
        x = nx;
        y = ny;
        if cfg.stop(step_sum) {
            converged = true;
            break;
        }
        nx = map.eval(&x, &y)?;
        ny = map.eval(&y, &x)?;
    }

    let residual =
        space.distance(&map.eval(&x, &y)?, &x)? + space.distance(&map.eval(&y, &x)?, &y)?;
    it.finish(x, y, converged, residual)
}

/// Nearest point of `image` to `from` among those passing `admissible`,
/// lowest index on ties.
fn select_edge_compatible(
    space: &MetricSpace,
    image: &FiniteSet,
    from: &Point,
    mut admissible: impl FnMut(&Point) -> Result<bool>,
) -> Result<Option<Point>> {
    let mut best: Option<(&Point, f64)> = None;
    for b in image.points() {
        if !admissible(b)? {
            continue;
        }
        let d = space.distance(from, b)?;
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((b, d));
        }
    }
    Ok(best.map(|(b, _)| b.clone()))
}

/// Set-valued coupled iteration seeded with `x1 ∈ F(x0,y0)`,
/// `y1 ∈ F(y0,x0)` such that `((x0,y0), (x1,y1))` is a product edge.
#[allow(clippy::too_many_arguments)]
pub fn solve_coupled_multi<M: CoupledMultiMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    graph: &Digraph,
    x0: &Point,
    y0: &Point,
    x1: &Point,
    y1: &Point,
    cfg: &SolveConfig,
) -> Result<Solution> {
    cfg.validate()?;
    for p in [x0, y0, x1, y1] {
        space.check_point(p)?;
    }
    let gap_x = dist_to_set(space, x1, &map.eval(x0, y0)?)?;
    if gap_x > INEQUALITY_SLACK {
        return Err(Error::InvalidSeed(format!(
            "x1 = {x1} is at distance {gap_x:e} from F(x0, y0)"
        )));
    }
    let gap_y = dist_to_set(space, y1, &map.eval(y0, x0)?)?;
    if gap_y > INEQUALITY_SLACK {
        return Err(Error::InvalidSeed(format!(
            "y1 = {y1} is at distance {gap_y:e} from F(y0, x0)"
        )));
    }
    let seed = PairPoint::new(x0.clone(), y0.clone())?;
    if !product_edge(graph, &seed, &PairPoint::new(x1.clone(), y1.clone())?)? {
        return Err(Error::SeedEdge);
    }
    let d0 = space.distance(x0, x1)? + space.distance(y0, y1)?;

    let mut it = Iterate::new(space, graph, cfg, d0);
    let (mut x, mut y) = (x0.clone(), y0.clone());
    let (mut nx, mut ny) = (x1.clone(), y1.clone());
    let mut previous_sum = None;
    let mut converged = false;
    while it.steps.len() < cfg.max_iter {
        let n = it.steps.len();
        let step_sum = it.record(&x, &y, &nx, &ny)?;
        if cfg.check_bounds {
            if let Some(prev) = previous_sum {
                let rhs = 0.5 * cfg.k * prev;
                let last = it.steps.last().expect("just recorded");
                for (quantity, lhs) in [("step_x", last.step_x), ("step_y", last.step_y)] {
                    if lhs > rhs + INEQUALITY_SLACK {
                        return Err(Error::HypothesisViolation {
                            step: n,
                            quantity,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
        previous_sum = Some(step_sum);
        x = nx;
        y = ny;
        if cfg.stop(step_sum) {
            converged = true;
            break;
        }
        let step = n + 1;
        nx = select_edge_compatible(space, &map.eval(&x, &y)?, &x, |b| graph.has_edge(&x, b))?
            .ok_or(Error::SelectionFailure {
                step,
                coordinate: 'x',
            })?;
        ny = select_edge_compatible(space, &map.eval(&y, &x)?, &y, |b| graph.has_edge(b, &y))?
            .ok_or(Error::SelectionFailure {
                step,
                coordinate: 'y',
            })?;
    }

    let residual =
        dist_to_set(space, &x, &map.eval(&x, &y)?)? + dist_to_set(space, &y, &map.eval(&y, &x)?)?;
    it.finish(x, y, converged, residual)
}

/// Checks `d(x_n, y_n) ≤ kⁿ d(x₀, y₀)` along a trace whose seed satisfies
/// `(x₀, y₀) ∈ E(G)`; under the graph contraction hypothesis this forces the
/// limit onto the diagonal.
pub fn diagonal_decay_check(
    trace: &IterationTrace,
    graph: &Digraph,
    k: f64,
) -> Result<Certificate> {
    validate_k(k)?;
    let first = trace
        .steps
        .first()
        .ok_or_else(|| Error::InvalidInput("trace has no steps".into()))?;
    if !graph.has_edge(&first.x, &first.y)? {
        return Err(Error::Inapplicable(format!(
            "seed ({}, {}) is not an edge",
            first.x, first.y
        )));
    }
    let diag0 = first.diag;
    let mut cert = CertificateBuilder::new(Property::DiagonalDecay, None);
    for s in &trace.steps {
        let bound = pow(k, s.n) * diag0;
        if s.diag > bound + INEQUALITY_SLACK {
            cert.violation(Violation {
                index: s.n,
                points: vec![s.x.clone(), s.y.clone()],
                measured: vec![s.diag, bound],
                detail: "d(x_n, y_n) exceeds kⁿ d(x_0, y_0)".into(),
            });
        }
    }
    Ok(cert.finish(trace.steps.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub x0: Point,
    pub y0: Point,
    pub fixed_point: Option<CoupledFixedPoint>,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Indices into [`UniquenessReport::runs`].
    pub members: Vec<usize>,
    pub representative: CoupledFixedPoint,
    /// Largest `d(x, x') + d(y, y')` between members.
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEdgeConflict {
    pub a: usize,
    pub b: usize,
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub runs: Vec<SeedRun>,
    pub clusters: Vec<Cluster>,
    /// Converged limits joined by a product edge yet more than `2·tol` apart.
    pub conflicts: Vec<ProductEdgeConflict>,
}

impl UniquenessReport {
    pub fn is_unique(&self) -> bool {
        self.clusters.len() == 1 && self.conflicts.is_empty()
    }
}

/// Solves from every seed and groups the converged limits.
///
/// Limits within `2·tol` (summed coordinate distance) are linked, clusters
/// are the connected components of that relation. Seed failures are recorded
/// per run and do not stop the probe.
pub fn uniqueness_probe<M: CoupledMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    graph: &Digraph,
    seeds: &[(Point, Point)],
    cfg: &SolveConfig,
) -> Result<UniquenessReport> {
    cfg.validate()?;
    let runs: Vec<SeedRun> = seeds
        .iter()
        .map(
            |(x0, y0)| match solve_coupled(map, space, graph, x0, y0, cfg) {
                Ok(sol) => SeedRun {
                    x0: x0.clone(),
                    y0: y0.clone(),
                    converged: sol.trace.converged,
                    fixed_point: Some(sol.fixed_point),
                    error: None,
                },
                Err(e) => SeedRun {
                    x0: x0.clone(),
                    y0: y0.clone(),
                    fixed_point: None,
                    converged: false,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();

    let limits: Vec<(usize, &CoupledFixedPoint)> = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.converged)
        .filter_map(|(i, r)| r.fixed_point.as_ref().map(|p| (i, p)))
        .collect();

    let separation = |a: &CoupledFixedPoint, b: &CoupledFixedPoint| -> Result<f64> {
        Ok(space.distance(&a.x, &b.x)? + space.distance(&a.y, &b.y)?)
    };

    let m = limits.len();
    let mut label: Vec<usize> = (0..m).collect();
    let mut conflicts = Vec::new();
    let mut sep = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (limits[i].1, limits[j].1);
            let s = separation(a, b)?;
            sep[i][j] = s;
            sep[j][i] = s;
            if s <= 2.0 * cfg.tol {
                let (from, to) = (label[j], label[i]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            } else {
                let pa = PairPoint::new(a.x.clone(), a.y.clone())?;
                let pb = PairPoint::new(b.x.clone(), b.y.clone())?;
                if product_edge(graph, &pa, &pb)? || product_edge(graph, &pb, &pa)? {
                    conflicts.push(ProductEdgeConflict {
                        a: limits[i].0,
                        b: limits[j].0,
                        separation: s,
                    });
                }
            }
        }
    }

    let mut clusters: Vec<Cluster> = Vec::new();
    let mut cluster_of_label: Vec<Option<usize>> = vec![None; m];
    let mut local_members: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        let c = *cluster_of_label[label[i]].get_or_insert_with(|| {
            clusters.push(Cluster {
                members: Vec::new(),
                representative: limits[i].1.clone(),
                diameter: 0.0,
            });
            local_members.push(Vec::new());
            clusters.len() - 1
        });
        clusters[c].members.push(limits[i].0);
        local_members[c].push(i);
    }
    for (cluster, members) in clusters.iter_mut().zip(&local_members) {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                cluster.diameter = cluster.diameter.max(sep[i][j]);
            }
        }
    }

    Ok(UniquenessReport {
        runs,
        clusters,
        conflicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{componentwise, FnMap, FnMultiMap, Singleton};

    fn p(v: f64) -> Point {
        Point::scalar(v)
    }

    fn line() -> MetricSpace {
        MetricSpace::real_line()
    }

    fn sum_fifth() -> impl CoupledMap + Clone {
        componentwise(|x, y| (x + y) / 5.0)
    }

    #[test]
    fn config_validation() {
        assert!(SolveConfig::new(0.5, 1e-9).is_ok());
        assert!(SolveConfig::new(1.0, 1e-9).is_err());
        assert!(SolveConfig::new(0.5, 0.0).is_err());
        assert!(SolveConfig::new(0.5, 1e-9)
            .unwrap()
            .max_iter(0)
            .validate()
            .is_err());
    }

    #[test]
    fn sum_fifth_from_zero_one() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-14)
            .unwrap()
            .record_edges(true);
        let sol = solve_coupled(
            &sum_fifth(),
            &line(),
            &Digraph::order(),
            &p(0.0),
            &p(1.0),
            &cfg,
        )
        .unwrap();
        assert!(sol.converged());
        assert_eq!(sol.trace.d0, 1.0);
        for s in &sol.trace.steps[1..] {
            let expected = 0.2 * 0.4f64.powi(s.n as i32 - 1);
            assert!((s.x.coords()[0] - expected).abs() <= 1e-12);
            assert_eq!(s.x, s.y);
        }
        assert!(sol.fixed_point.x.coords()[0].abs() < 1e-12);
        assert!(sol.fixed_point.is_diagonal);
        // not mixed monotone on the order graph, so edges break after step 0
        assert_eq!(sol.trace.steps[0].edge_ok_x, Some(true));
        assert_eq!(sol.trace.steps[1].edge_ok_x, Some(false));
    }

    #[test]
    fn fixed_seed_converges_in_one_step() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-12).unwrap();
        let sol = solve_coupled(
            &sum_fifth(),
            &line(),
            &Digraph::order(),
            &p(0.0),
            &p(0.0),
            &cfg,
        )
        .unwrap();
        assert!(sol.converged());
        assert_eq!(sol.trace.len(), 1);
        assert_eq!(sol.trace.d0, 0.0);
        assert_eq!(sol.fixed_point.x, p(0.0));
        assert_eq!(sol.trace.residual, 0.0);
    }

    #[test]
    fn halving_first_coordinate() {
        let half = componentwise(|x, _| x / 2.0);
        let cfg = SolveConfig::new(0.5, 1e-12).unwrap();
        let sol = solve_coupled(&half, &line(), &Digraph::full(), &p(8.0), &p(0.0), &cfg).unwrap();
        assert!(sol.converged());
        for s in &sol.trace.steps {
            assert_eq!(s.x, p(8.0 / 2f64.powi(s.n as i32)));
            assert_eq!(s.y, p(0.0));
        }
        assert!(sol.fixed_point.x.coords()[0] < 1e-11);
    }

    #[test]
    fn seed_edge_is_enforced() {
        let cfg = SolveConfig::new(0.5, 1e-9).unwrap();
        // F(1,0) = F(0,1) = 1/5: needs 1 ≤ 1/5
        let err = solve_coupled(
            &sum_fifth(),
            &line(),
            &Digraph::order(),
            &p(1.0),
            &p(0.0),
            &cfg,
        )
        .unwrap_err();
        assert_eq!(err, Error::SeedEdge);
    }

    #[test]
    fn non_convergence_is_a_result() {
        let cfg = SolveConfig::new(0.5, 1e-12).unwrap().max_iter(3);
        let sol = solve_coupled(
            &sum_fifth(),
            &line(),
            &Digraph::full(),
            &p(0.0),
            &p(1.0),
            &cfg,
        )
        .unwrap();
        assert!(!sol.converged());
        assert_eq!(sol.trace.len(), 3);
    }

    #[test]
    fn bound_violation_is_reported() {
        // x ↦ 0.9 x is not a contraction with k = 0.1
        let f = componentwise(|x, _| 0.9 * x);
        let cfg = SolveConfig::new(0.1, 1e-9).unwrap().check_bounds(true);
        let err = solve_coupled(&f, &line(), &Digraph::full(), &p(1.0), &p(0.0), &cfg).unwrap_err();
        assert!(
            matches!(err, Error::HypothesisViolation { step: 1, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn diagonal_seed_stays_diagonal() {
        let f = componentwise(|x, y| 0.3 * x - 0.1 * y + 1.0);
        let cfg = SolveConfig::new(0.9, 1e-12).unwrap();
        let sol = solve_coupled(&f, &line(), &Digraph::full(), &p(2.5), &p(2.5), &cfg).unwrap();
        assert!(sol.trace.steps.iter().all(|s| s.x == s.y && s.diag == 0.0));
    }

    #[test]
    fn bound_helpers() {
        assert_eq!(step_bound(2.0 / 3.0, 2.0, 0).unwrap(), 1.0);
        assert!((step_bound(0.4, 1.0, 1).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(step_bound(0.5, 4.0, 3).unwrap(), 0.25);
        assert!(step_bound(1.2, 1.0, 0).is_err());
        assert!(step_bound(0.5, -1.0, 0).is_err());

        assert_eq!(tail_bound(0.5, 1.0, 0).unwrap(), 1.0);
        assert_eq!(tail_bound(0.3, 0.0, 4).unwrap(), 0.0);
        let t = tail_bound(0.4, 1.0, 5).unwrap();
        assert!((t - 0.008_533_333_333_333_333).abs() < 1e-15);
        let summed: f64 = (5..2000).map(|n| step_bound(0.4, 1.0, n).unwrap()).sum();
        assert!((t - summed).abs() < 1e-15);
        assert!(tail_bound(0.0, 1.0, 0).is_err());
    }

    fn two_branch() -> impl CoupledMultiMap {
        FnMultiMap(|x: &Point, y: &Point| {
            let s = (x.coords()[0] + y.coords()[0]) / 5.0;
            vec![p(-s), p(s)]
        })
    }

    #[test]
    fn two_branch_on_full_graph() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-14)
            .unwrap()
            .check_bounds(true);
        let sol = solve_coupled_multi(
            &two_branch(),
            &line(),
            &Digraph::full(),
            &p(0.0),
            &p(1.0),
            &p(-0.2),
            &p(-0.2),
            &cfg,
        )
        .unwrap();
        assert!(sol.converged());
        for s in &sol.trace.steps[1..] {
            let expected = -0.2 * 0.4f64.powi(s.n as i32 - 1);
            assert!((s.x.coords()[0] - expected).abs() <= 1e-12);
            assert_eq!(s.x, s.y);
        }
        assert!(sol.trace.residual <= 1e-12);
    }

    #[test]
    fn two_branch_order_graph_seed_is_not_a_product_edge() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-12).unwrap();
        let err = solve_coupled_multi(
            &two_branch(),
            &line(),
            &Digraph::order(),
            &p(0.0),
            &p(1.0),
            &p(-0.2),
            &p(-0.2),
            &cfg,
        )
        .unwrap_err();
        assert_eq!(err, Error::SeedEdge);
    }

    #[test]
    fn multi_seed_must_lie_in_image() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-12).unwrap();
        let err = solve_coupled_multi(
            &two_branch(),
            &line(),
            &Digraph::full(),
            &p(0.0),
            &p(1.0),
            &p(0.3),
            &p(-0.2),
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidSeed(_)));
    }

    #[test]
    fn selection_failure_when_no_edge() {
        // image always lies strictly below: no (x_n, b) edge in the order graph
        let down = FnMultiMap(|x: &Point, _: &Point| vec![p(x.coords()[0] - 1.0)]);
        let cfg = SolveConfig::new(0.5, 1e-12).unwrap();
        // the graph only links 0 and -1, so the seed works but step 1 has nowhere to go
        let g = Digraph::from_predicate(|a, b| {
            a.coords()[0] == 0.0 && b.coords()[0] == -1.0
                || a.coords()[0] == -1.0 && b.coords()[0] == 0.0
        });
        let err = solve_coupled_multi(
            &down,
            &line(),
            &g,
            &p(0.0),
            &p(0.0),
            &p(-1.0),
            &p(-1.0),
            &cfg,
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                Error::SelectionFailure {
                    step: 1,
                    coordinate: 'x'
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn constant_image_converges_in_one_step() {
        let zero = FnMultiMap(|_: &Point, _: &Point| vec![p(0.0)]);
        let cfg = SolveConfig::new(0.5, 1e-12).unwrap();
        let sol = solve_coupled_multi(
            &zero,
            &line(),
            &Digraph::order(),
            &p(-3.0),
            &p(4.0),
            &p(0.0),
            &p(0.0),
            &cfg,
        )
        .unwrap();
        assert!(sol.converged());
        assert_eq!(sol.trace.len(), 2);
        assert_eq!(sol.fixed_point.x, p(0.0));
        assert_eq!(sol.fixed_point.y, p(0.0));
    }

    #[test]
    fn singleton_wrapping_reproduces_single_trace() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-13)
            .unwrap()
            .record_edges(true);
        let g = Digraph::full();
        let single = solve_coupled(&sum_fifth(), &line(), &g, &p(0.0), &p(1.0), &cfg).unwrap();
        let multi = solve_coupled_multi(
            &Singleton(sum_fifth()),
            &line(),
            &g,
            &p(0.0),
            &p(1.0),
            &p(0.2),
            &p(0.2),
            &cfg,
        )
        .unwrap();
        assert_eq!(single, multi);
    }

    #[test]
    fn diagonal_decay_examples() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-12).unwrap();
        let g = Digraph::order();
        let sol = solve_coupled(&sum_fifth(), &line(), &g, &p(0.0), &p(1.0), &cfg).unwrap();
        assert!(diagonal_decay_check(&sol.trace, &g, 2.0 / 3.0)
            .unwrap()
            .passed());

        let full = Digraph::full();
        let sol = solve_coupled(&sum_fifth(), &line(), &full, &p(3.0), &p(3.0), &cfg).unwrap();
        assert!(diagonal_decay_check(&sol.trace, &full, 2.0 / 3.0)
            .unwrap()
            .passed());

        let half = componentwise(|x, _| x / 2.0);
        let full = Digraph::full();
        let cfg = SolveConfig::new(0.5, 1e-12).unwrap();
        let sol = solve_coupled(&half, &line(), &full, &p(8.0), &p(0.0), &cfg).unwrap();
        let cert = diagonal_decay_check(&sol.trace, &full, 0.5).unwrap();
        assert!(cert.passed());
        assert!(sol
            .trace
            .steps
            .iter()
            .all(|s| s.diag == 8.0 * 0.5f64.powi(s.n as i32)));

        // a tighter k than the map delivers is caught
        let cert = diagonal_decay_check(&sol.trace, &full, 0.25).unwrap();
        assert!(!cert.passed());
        assert_eq!(cert.violations[0].index, 1);
    }

    #[test]
    fn diagonal_decay_needs_seed_edge() {
        let cfg = SolveConfig::new(0.5, 1e-12).unwrap();
        // points within 0.9 of each other: the seed (0, -1) is not an edge but
        // (0, 0.2) and (-0.2, -1) are
        let g = Digraph::from_predicate(|a: &Point, b: &Point| {
            (a.coords()[0] - b.coords()[0]).abs() <= 0.9
        });
        let f = componentwise(|x, y| 0.2 * x - 0.2 * y);
        let sol = solve_coupled(&f, &line(), &g, &p(0.0), &p(-1.0), &cfg).unwrap();
        assert!(matches!(
            diagonal_decay_check(&sol.trace, &g, 0.5),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn uniqueness_examples() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-10).unwrap();
        let seeds = vec![(p(0.0), p(1.0)), (p(-3.0), p(2.0)), (p(5.0), p(5.0))];
        let report =
            uniqueness_probe(&sum_fifth(), &line(), &Digraph::full(), &seeds, &cfg).unwrap();
        assert!(report.is_unique(), "{report:?}");
        assert_eq!(report.clusters[0].members, vec![0, 1, 2]);
        assert!(report.clusters[0].diameter <= 2e-10);

        let one =
            uniqueness_probe(&sum_fifth(), &line(), &Digraph::full(), &seeds[..1], &cfg).unwrap();
        assert!(one.is_unique());

        let half = componentwise(|x, _| x / 2.0);
        let cfg = SolveConfig::new(0.5, 1e-10).unwrap();
        let seeds = vec![(p(1.0), p(1.0)), (p(-1.0), p(-1.0))];
        let report = uniqueness_probe(&half, &line(), &Digraph::full(), &seeds, &cfg).unwrap();
        assert!(report.is_unique());
    }

    #[test]
    fn uniqueness_reports_separate_limits() {
        // two attracting fixed points, 1 and -1
        let f = FnMap(|x: &Point, _: &Point| {
            let v = x.coords()[0];
            p(v.signum() * (0.5 + 0.5 * v.abs()))
        });
        let cfg = SolveConfig::new(0.9, 1e-10).unwrap();
        let seeds = vec![(p(0.5), p(0.5)), (p(-0.5), p(-0.5))];
        let report = uniqueness_probe(&f, &line(), &Digraph::full(), &seeds, &cfg).unwrap();
        assert_eq!(report.clusters.len(), 2);
        assert!(!report.conflicts.is_empty());
        assert!(!report.is_unique());
    }

    #[test]
    fn uniqueness_continues_past_seed_errors() {
        let cfg = SolveConfig::new(2.0 / 3.0, 1e-10).unwrap();
        let seeds = vec![(p(1.0), p(0.0)), (p(0.0), p(1.0))];
        let report =
            uniqueness_probe(&sum_fifth(), &line(), &Digraph::order(), &seeds, &cfg).unwrap();
        assert!(report.runs[0].error.is_some());
        assert!(report.runs[1].converged);
        assert_eq!(report.clusters.len(), 1);
        assert_eq!(report.clusters[0].members, vec![1]);
    }
}
