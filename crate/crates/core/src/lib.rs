//! Coupled fixed points of mixed monotone maps on metric spaces carrying a
//! reflexive directed graph.
//!
//! The crate provides the metric and graph layer, single- and set-valued
//! coupled maps, a Picard-type solver with a priori error bounds, and sampled
//! falsifiers for the hypotheses that guarantee convergence.

pub mod certificate;
pub mod certifier;
pub mod checks;
pub mod error;
pub mod graph;
pub mod map;
pub mod metric;
pub mod point;
pub mod sampling;
pub mod set;
pub mod solver;

pub use certificate::{Certificate, Outcome, Property, Violation, MAX_WITNESSES};
pub use certifier::{
    check_limit_closure, preflight, Direction, HypothesisReport, Problem, ProblemMap, Theorem,
};
pub use checks::{
    check_contraction, check_mixed_monotone, check_mixed_monotone_multi, check_multi_contraction,
    estimate_k, estimate_k_multi, INEQUALITY_SLACK,
};
pub use error::{Error, Result};
pub use graph::{is_path, product_edge, Digraph, GraphMode, PathQuery};
pub use map::{componentwise, CoupledMap, CoupledMultiMap, FnMap, FnMultiMap, Singleton};
pub use metric::MetricSpace;
pub use point::{PairPoint, Point};
pub use sampling::{Region, SampleSpec};
pub use set::{dist_to_set, excess, hausdorff, select_near, FiniteSet};
pub use solver::{
    diagonal_decay_check, solve_coupled, solve_coupled_multi, step_bound, tail_bound,
    uniqueness_probe, Cluster, CoupledFixedPoint, IterationTrace, Mode, ProductEdgeConflict,
    SeedRun, Solution, SolveConfig, StepRecord, UniquenessReport,
};
