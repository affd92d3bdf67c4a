//! Pre-flight hypothesis reports for a coupled fixed-point problem.
//!
//! Everything here is a falsifier. Continuity cannot be established by
//! sampling at all, so it is taken as a user assertion; limit closure is only
//! tested on the sequences the solver actually produces.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, CertificateBuilder, Property, Violation};
use crate::checks::{
    check_contraction, check_mixed_monotone, check_mixed_monotone_multi, check_multi_contraction,
};
use crate::error::{Error, Result};
use crate::graph::{product_edge, Digraph};
use crate::map::{CoupledMap, CoupledMultiMap};
use crate::metric::MetricSpace;
use crate::point::{PairPoint, Point};
use crate::sampling::SampleSpec;
use crate::set::{dist_to_set, hausdorff};
use crate::solver::{solve_coupled, solve_coupled_multi, Mode, Solution, SolveConfig};

/// Iteration cap for the trial run behind the limit-closure check.
pub const TRIAL_ITERATIONS: usize = 200;
/// Tolerance for the continuity spot check.
pub const CONTINUITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `(x_n, x_{n+1}) ∈ E` should give `(x_n, x) ∈ E`.
    Ascending,
    /// `(x_{n+1}, x_n) ∈ E` should give `(x, x_n) ∈ E`.
    Descending,
}

/// Tests the limit-closure property of `(X, d, G)` on one convergent
/// sequence. If the sequence does not have the required consecutive edges
/// the certificate is inapplicable rather than failed.
pub fn check_limit_closure(
    graph: &Digraph,
    sequence: &[Point],
    limit: &Point,
    direction: Direction,
) -> Result<Certificate> {
    if sequence.is_empty() {
        return Err(Error::InvalidInput("sequence is empty".into()));
    }
    let mut cert = CertificateBuilder::new(Property::LimitClosure, None);
    for (i, w) in sequence.windows(2).enumerate() {
        let premise = match direction {
            Direction::Ascending => graph.has_edge(&w[0], &w[1])?,
            Direction::Descending => graph.has_edge(&w[1], &w[0])?,
        };
        if !premise {
            cert.inapplicable(Violation {
                index: i,
                points: vec![w[0].clone(), w[1].clone()],
                measured: vec![],
                detail: "premise-violated: consecutive terms are not joined by an edge".into(),
            });
            return Ok(cert.finish(i + 1));
        }
    }
    for (i, term) in sequence.iter().enumerate() {
        let ok = match direction {
            Direction::Ascending => graph.has_edge(term, limit)?,
            Direction::Descending => graph.has_edge(limit, term)?,
        };
        if !ok {
            cert.violation(Violation {
                index: i,
                points: vec![term.clone(), limit.clone()],
                measured: vec![],
                detail: match direction {
                    Direction::Ascending => "(x_n, x) is not an edge".into(),
                    Direction::Descending => "(x, x_n) is not an edge".into(),
                },
            });
        }
    }
    Ok(cert.finish(sequence.len()))
}

#[derive(Clone)]
pub enum ProblemMap {
    Single(Arc<dyn CoupledMap>),
    Multi(Arc<dyn CoupledMultiMap>),
}

impl ProblemMap {
    pub fn is_multi(&self) -> bool {
        matches!(self, ProblemMap::Multi(_))
    }
}

impl fmt::Debug for ProblemMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_multi() {
            "Multi(..)"
        } else {
            "Single(..)"
        })
    }
}

/// A complete problem instance: space, graph, map, seed and solver settings.
#[derive(Debug, Clone)]
pub struct Problem {
    pub id: String,
    pub space: MetricSpace,
    pub graph: Digraph,
    pub map: ProblemMap,
    /// User assertion that `F` is continuous.
    pub continuous: bool,
    pub x0: Point,
    pub y0: Point,
    /// First iterates for set-valued maps.
    pub x1: Option<Point>,
    pub y1: Option<Point>,
    pub solve: SolveConfig,
}

impl Problem {
    pub fn k(&self) -> f64 {
        self.solve.k
    }

    pub fn solve_with(&self, cfg: &SolveConfig) -> Result<Solution> {
        match &self.map {
            ProblemMap::Single(f) => solve_coupled(
                f.as_ref(),
                &self.space,
                &self.graph,
                &self.x0,
                &self.y0,
                cfg,
            ),
            ProblemMap::Multi(f) => {
                let (x1, y1) = self.multi_seed()?;
                solve_coupled_multi(
                    f.as_ref(),
                    &self.space,
                    &self.graph,
                    &self.x0,
                    &self.y0,
                    x1,
                    y1,
                    cfg,
                )
            }
        }
    }

    pub fn solve(&self) -> Result<Solution> {
        self.solve_with(&self.solve)
    }

    fn multi_seed(&self) -> Result<(&Point, &Point)> {
        match (&self.x1, &self.y1) {
            (Some(x1), Some(y1)) => Ok((x1, y1)),
            _ => Err(Error::InvalidSeed(
                "set-valued problems need first iterates x1 and y1".into(),
            )),
        }
    }

    /// The seed condition of the existence results.
    fn seed_edge(&self) -> Result<bool> {
        let seed = PairPoint::new(self.x0.clone(), self.y0.clone())?;
        let next = match &self.map {
            ProblemMap::Single(f) => {
                PairPoint::new(f.eval(&self.x0, &self.y0)?, f.eval(&self.y0, &self.x0)?)?
            }
            ProblemMap::Multi(f) => {
                let (x1, y1) = self.multi_seed()?;
                let in_x = dist_to_set(&self.space, x1, &f.eval(&self.x0, &self.y0)?)? <= 1e-12;
                let in_y = dist_to_set(&self.space, y1, &f.eval(&self.y0, &self.x0)?)? <= 1e-12;
                if !(in_x && in_y) {
                    return Ok(false);
                }
                PairPoint::new(x1.clone(), y1.clone())?
            }
        };
        product_edge(&self.graph, &seed, &next)
    }
}

/// Which existence result has all its sampled hypotheses passing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    ContinuousSingle,
    LimitClosureSingle,
    ContinuousMulti,
    LimitClosureMulti,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub instance_id: String,
    pub k: f64,
    pub continuity_asserted: bool,
    pub seed_edge_ok: bool,
    pub certificates: Vec<Certificate>,
    pub theorem_applicable: Theorem,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn certificate(&self, property: Property) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.property == property)
    }

    fn all_passed(&self, property: Property) -> bool {
        let mut found = false;
        for c in self.certificates.iter().filter(|c| c.property == property) {
            if !c.passed() {
                return false;
            }
            found = true;
        }
        found
    }

    /// Mixed monotonicity, graph contraction and the seed edge.
    pub fn base_hypotheses_hold(&self) -> bool {
        let monotone = self.all_passed(Property::MixedMonotone)
            || self.all_passed(Property::MixedMonotoneMulti);
        let contraction = self.all_passed(Property::GraphContraction)
            || self.all_passed(Property::MultiGraphContraction);
        monotone && contraction && self.seed_edge_ok
    }

    pub fn limit_closure_holds(&self) -> bool {
        self.all_passed(Property::LimitClosure)
    }

    /// Whether the hypotheses behind `mode` all passed.
    pub fn satisfies(&self, mode: Mode) -> bool {
        match mode {
            Mode::Continuous => matches!(
                self.theorem_applicable,
                Theorem::ContinuousSingle | Theorem::ContinuousMulti
            ),
            Mode::LimitClosure => self.base_hypotheses_hold() && self.limit_closure_holds(),
        }
    }
}

fn run_check(
    notes: &mut Vec<String>,
    certificates: &mut Vec<Certificate>,
    what: &str,
    result: Result<Certificate>,
) {
    match result {
        Ok(c) => certificates.push(c),
        Err(e) => notes.push(format!("{what} check could not run: {e}")),
    }
}

/// Runs every sampled hypothesis check for `problem` and decides which
/// existence result applies. Failures are recorded, never returned.
pub fn preflight(problem: &Problem, sampler: &SampleSpec) -> HypothesisReport {
    let mut notes = Vec::new();
    let mut certificates = Vec::new();
    let k = problem.k();

    match &problem.map {
        ProblemMap::Single(f) => {
            run_check(
                &mut notes,
                &mut certificates,
                "mixed monotone",
                check_mixed_monotone(f.as_ref(), &problem.graph, sampler),
            );
            run_check(
                &mut notes,
                &mut certificates,
                "graph contraction",
                check_contraction(f.as_ref(), &problem.space, &problem.graph, k, sampler),
            );
        }
        ProblemMap::Multi(f) => {
            run_check(
                &mut notes,
                &mut certificates,
                "mixed monotone",
                check_mixed_monotone_multi(f.as_ref(), &problem.graph, sampler),
            );
            run_check(
                &mut notes,
                &mut certificates,
                "graph contraction",
                check_multi_contraction(f.as_ref(), &problem.space, &problem.graph, k, sampler),
            );
        }
    }

    let seed_edge_ok = match problem.seed_edge() {
        Ok(ok) => ok,
        Err(e) => {
            notes.push(format!("seed condition could not be evaluated: {e}"));
            false
        }
    };
    if !seed_edge_ok {
        notes.push("seed pair is not joined to its first iterate by a product edge".into());
    }

    if problem.continuous {
        notes.push("continuity of F is a user assertion; sampling cannot verify it".into());
        match continuity_spot_check(problem, sampler) {
            Ok(None) => notes.push(format!(
                "continuity spot check not falsified (tolerance {CONTINUITY_TOLERANCE:e})"
            )),
            Ok(Some(msg)) => notes.push(msg),
            Err(e) => notes.push(format!("continuity spot check could not run: {e}")),
        }
    }
    if !problem.continuous || problem.solve.mode == Mode::LimitClosure {
        trial_limit_closure(problem, &mut notes, &mut certificates);
    }

    let mut report = HypothesisReport {
        instance_id: problem.id.clone(),
        k,
        continuity_asserted: problem.continuous,
        seed_edge_ok,
        certificates,
        theorem_applicable: Theorem::None,
        notes,
    };
    let multi = problem.map.is_multi();
    report.theorem_applicable = if report.base_hypotheses_hold() && problem.continuous {
        if multi {
            Theorem::ContinuousMulti
        } else {
            Theorem::ContinuousSingle
        }
    } else if report.base_hypotheses_hold() && report.limit_closure_holds() {
        if multi {
            Theorem::LimitClosureMulti
        } else {
            Theorem::LimitClosureSingle
        }
    } else {
        Theorem::None
    };
    report
}

/// Runs a short trial iteration and tests limit closure on the `x` sequence
/// (ascending) and the `y` sequence (descending).
fn trial_limit_closure(problem: &Problem, notes: &mut Vec<String>, certs: &mut Vec<Certificate>) {
    let mut cfg = problem.solve.clone().check_bounds(false);
    cfg.max_iter = cfg.max_iter.min(TRIAL_ITERATIONS);
    let sol = match problem.solve_with(&cfg) {
        Ok(sol) => sol,
        Err(e) => {
            notes.push(format!(
                "trial iteration for the limit-closure check failed: {e}"
            ));
            return;
        }
    };
    if !sol.converged() {
        notes.push(format!(
            "trial iteration did not converge in {} steps; last iterate used as the limit",
            cfg.max_iter
        ));
    }
    let xs: Vec<Point> = sol.trace.steps.iter().map(|s| s.x.clone()).collect();
    let ys: Vec<Point> = sol.trace.steps.iter().map(|s| s.y.clone()).collect();
    let fp = &sol.fixed_point;
    for (seq, limit, dir) in [
        (&xs, &fp.x, Direction::Ascending),
        (&ys, &fp.y, Direction::Descending),
    ] {
        match check_limit_closure(&problem.graph, seq, limit, dir) {
            Ok(c) => certs.push(c),
            Err(e) => notes.push(format!("limit-closure check could not run: {e}")),
        }
    }
    if certs
        .iter()
        .filter(|c| c.property == Property::LimitClosure)
        .all(Certificate::passed)
    {
        notes.push("limit closure not falsified on the trial sequences".into());
    }
}

/// Compares `F` at sampled points with `F` at nearby points. Returns a
/// message describing the first discrepancy, if any.
fn continuity_spot_check(problem: &Problem, sampler: &SampleSpec) -> Result<Option<String>> {
    const PROBES: usize = 16;
    let h = 2f64.powi(-40);
    let points = sampler
        .clone()
        .with_count(2 * PROBES)
        .collect(|s| Ok(Some(s.point())))?;
    for pair in points.chunks_exact(2) {
        let (x, y) = (&pair[0], &pair[1]);
        let shift = |p: &Point| Point::new(p.coords().iter().map(|c| c + h).collect());
        let (xs, ys) = (shift(x), shift(y));
        let gap = match &problem.map {
            ProblemMap::Single(f) => problem.space.distance(&f.eval(x, y)?, &f.eval(&xs, &ys)?)?,
            ProblemMap::Multi(f) => hausdorff(&problem.space, &f.eval(x, y)?, &f.eval(&xs, &ys)?)?,
        };
        if gap > CONTINUITY_TOLERANCE {
            return Ok(Some(format!(
                "continuity spot check: F moved by {gap:e} under a {h:e} shift at ({x}, {y})"
            )));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Outcome;
    use crate::map::{componentwise, FnMap, FnMultiMap};

    fn p(v: f64) -> Point {
        Point::scalar(v)
    }

    #[test]
    fn decreasing_geometric_sequence_on_order_graph() {
        let seq: Vec<Point> = (1..40).map(|n| p(0.2 * 0.4f64.powi(n - 1))).collect();
        let cert =
            check_limit_closure(&Digraph::order(), &seq, &p(0.0), Direction::Descending).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.samples_tested, seq.len());
    }

    #[test]
    fn constant_sequence_passes() {
        let seq = vec![p(3.0); 5];
        for dir in [Direction::Ascending, Direction::Descending] {
            let cert = check_limit_closure(&Digraph::order(), &seq, &p(3.0), dir).unwrap();
            assert!(cert.passed());
        }
    }

    #[test]
    fn missing_limit_edges_fail() {
        // terms 1 - 1/n joined consecutively, nothing reaches the limit 1
        let terms: Vec<Point> = (1..=4).map(|n| p(1.0 - 1.0 / n as f64)).collect();
        let mut vertices = terms.clone();
        vertices.push(p(1.0));
        let g = Digraph::from_index_edges(vertices, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let cert = check_limit_closure(&g, &terms, &p(1.0), Direction::Ascending).unwrap();
        assert_eq!(cert.outcome, Outcome::Failed);
        assert_eq!(cert.violation_count, 4);
        assert_eq!(cert.violations[0].points, vec![p(0.0), p(1.0)]);
    }

    #[test]
    fn broken_premise_is_inapplicable() {
        let seq = vec![p(0.0), p(1.0), p(0.5)];
        let cert =
            check_limit_closure(&Digraph::order(), &seq, &p(0.5), Direction::Ascending).unwrap();
        assert_eq!(cert.outcome, Outcome::Inapplicable);
        assert!(!cert.passed());
        assert_eq!(cert.violations.len(), 1);
        assert!(cert.violations[0].detail.starts_with("premise-violated"));
    }

    #[test]
    fn empty_sequence_is_rejected() {
        assert!(
            check_limit_closure(&Digraph::order(), &[], &p(0.0), Direction::Ascending).is_err()
        );
    }

    fn problem(map: ProblemMap, graph: Digraph, k: f64, continuous: bool) -> Problem {
        Problem {
            id: "t".into(),
            space: MetricSpace::real_line(),
            graph,
            map,
            continuous,
            x0: p(0.0),
            y0: p(1.0),
            x1: None,
            y1: None,
            solve: SolveConfig::new(k, 1e-12).unwrap(),
        }
    }

    fn sampler() -> SampleSpec {
        SampleSpec::cube(1, -10.0, 10.0, 10_000, 2024)
    }

    #[test]
    fn sum_fifth_full_graph_continuous() {
        let f: Arc<dyn CoupledMap> = Arc::new(componentwise(|x, y| (x + y) / 5.0));
        let pr = problem(ProblemMap::Single(f), Digraph::full(), 2.0 / 3.0, true);
        let report = preflight(&pr, &sampler());
        assert_eq!(report.theorem_applicable, Theorem::ContinuousSingle);
        assert!(report.certificates.iter().all(|c| c.passed()));
        assert!(report
            .certificates
            .iter()
            .all(|c| c.samples_tested >= 10_000));
        assert!(report.seed_edge_ok);
    }

    #[test]
    fn sum_fifth_order_graph_is_not_certified() {
        let f: Arc<dyn CoupledMap> = Arc::new(componentwise(|x, y| (x + y) / 5.0));
        let pr = problem(ProblemMap::Single(f), Digraph::order(), 2.0 / 3.0, true);
        let report = preflight(&pr, &sampler());
        assert!(report.seed_edge_ok);
        assert!(!report
            .certificate(Property::MixedMonotone)
            .unwrap()
            .passed());
        assert!(report
            .certificate(Property::GraphContraction)
            .unwrap()
            .passed());
        assert_eq!(report.theorem_applicable, Theorem::None);
    }

    #[test]
    fn mixed_monotone_map_without_continuity_uses_limit_closure() {
        let f: Arc<dyn CoupledMap> = Arc::new(componentwise(|x, y| 0.25 * x - 0.1 * y + 0.3));
        let mut pr = problem(ProblemMap::Single(f), Digraph::order(), 0.9, false);
        pr.x0 = p(-5.0);
        pr.y0 = p(5.0);
        let report = preflight(&pr, &sampler());
        assert!(report.base_hypotheses_hold(), "{report:#?}");
        let closure: Vec<_> = report
            .certificates
            .iter()
            .filter(|c| c.property == Property::LimitClosure)
            .collect();
        assert_eq!(closure.len(), 2);
        assert_eq!(
            report.theorem_applicable,
            Theorem::LimitClosureSingle,
            "{report:#?}"
        );
        assert!(report.satisfies(Mode::LimitClosure));
        assert!(!report.satisfies(Mode::Continuous));
    }

    #[test]
    fn first_projection_fails_contraction() {
        let f: Arc<dyn CoupledMap> = Arc::new(FnMap(|x: &Point, _: &Point| x.clone()));
        let pr = problem(ProblemMap::Single(f), Digraph::order(), 0.5, true);
        let report = preflight(&pr, &sampler());
        assert!(!report
            .certificate(Property::GraphContraction)
            .unwrap()
            .passed());
        assert_eq!(report.theorem_applicable, Theorem::None);
    }

    #[test]
    fn two_branch_full_graph() {
        let f: Arc<dyn CoupledMultiMap> = Arc::new(FnMultiMap(|x: &Point, y: &Point| {
            let s = (x.coords()[0] + y.coords()[0]) / 5.0;
            vec![p(-s), p(s)]
        }));
        let mut pr = problem(ProblemMap::Multi(f), Digraph::full(), 2.0 / 3.0, true);
        pr.x1 = Some(p(-0.2));
        pr.y1 = Some(p(-0.2));
        let report = preflight(&pr, &sampler());
        assert_eq!(
            report.theorem_applicable,
            Theorem::ContinuousMulti,
            "{report:#?}"
        );

        pr.x1 = None;
        let report = preflight(&pr, &sampler());
        assert!(!report.seed_edge_ok);
        assert_eq!(report.theorem_applicable, Theorem::None);
    }

    #[test]
    fn discontinuous_map_is_flagged() {
        let f: Arc<dyn CoupledMap> =
            Arc::new(componentwise(|x, _| if x > 0.0 { 0.1 } else { 0.0 }));
        let pr = problem(ProblemMap::Single(f), Digraph::full(), 0.5, true);
        // every probe near 0 would be needed to see the jump; force one
        let sampler = SampleSpec::from_points(vec![p(-2f64.powi(-41))], 10, 0);
        let report = preflight(&pr, &sampler);
        assert!(
            report.notes.iter().any(|n| n.contains("moved by")),
            "{:?}",
            report.notes
        );
    }
}
