//! Sampled falsifiers for the mixed monotone and graph contraction
//! hypotheses. A passing certificate only says no counterexample turned up.

use crate::certificate::{Certificate, CertificateBuilder, Property, Violation};
use crate::error::{Error, Result};
use crate::graph::{product_edge, Digraph};
use crate::map::{CoupledMap, CoupledMultiMap};
use crate::metric::MetricSpace;
use crate::point::{PairPoint, Point};
use crate::sampling::SampleSpec;
use crate::set::dist_to_set;

/// Absolute slack granted to every sampled inequality.
pub const INEQUALITY_SLACK: f64 = 1e-12;

pub(crate) fn validate_k(k: f64) -> Result<()> {
    if k > 0.0 && k < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "k must lie in (0,1), got {k}"
        )))
    }
}

/// Triples `(a, b, c)` with `(a, b) ∈ E(G)`.
fn edge_triples(graph: &Digraph, sampler: &SampleSpec) -> Result<Vec<[Point; 3]>> {
    sampler.collect(|s| {
        let (a, b, c) = (s.point(), s.point(), s.point());
        Ok(graph.has_edge(&a, &b)?.then_some([a, b, c]))
    })
}

/// Pairs of pairs joined by an edge of the product graph.
fn product_edge_samples(
    graph: &Digraph,
    sampler: &SampleSpec,
) -> Result<Vec<(PairPoint, PairPoint)>> {
    sampler.collect(|s| {
        let a = PairPoint::new(s.point(), s.point())?;
        let b = PairPoint::new(s.point(), s.point())?;
        Ok(product_edge(graph, &a, &b)?.then_some((a, b)))
    })
}

/// Each sample `(a, b, c)` with `(a, b) ∈ E` tests both clauses:
/// `(F(a,c), F(b,c)) ∈ E` and, reading `a, b` as `y1, y2`,
/// `(F(c,b), F(c,a)) ∈ E`.
pub fn check_mixed_monotone<M: CoupledMap + ?Sized>(
    map: &M,
    graph: &Digraph,
    sampler: &SampleSpec,
) -> Result<Certificate> {
    let samples = edge_triples(graph, sampler)?;
    let mut cert = CertificateBuilder::new(Property::MixedMonotone, Some(sampler.seed));
    for (i, [a, b, c]) in samples.iter().enumerate() {
        let (u, v) = (map.eval(a, c)?, map.eval(b, c)?);
        if !graph.has_edge(&u, &v)? {
            cert.violation(Violation {
                index: i,
                points: vec![a.clone(), b.clone(), c.clone(), u, v],
                measured: vec![],
                detail: "first argument: (x1, x2) is an edge but (F(x1,y), F(x2,y)) is not".into(),
            });
        }
        let (u, v) = (map.eval(c, b)?, map.eval(c, a)?);
        if !graph.has_edge(&u, &v)? {
            cert.violation(Violation {
                index: i,
                points: vec![a.clone(), b.clone(), c.clone(), u, v],
                measured: vec![],
                detail: "second argument: (y1, y2) is an edge but (F(x,y2), F(x,y1)) is not".into(),
            });
        }
    }
    Ok(cert.finish(samples.len()))
}

/// `true` if every point of `from` has an edge into some point of `to`.
fn every_has_edge_into(graph: &Digraph, from: &[Point], to: &[Point]) -> Result<Option<Point>> {
    'outer: for u in from {
        for v in to {
            if graph.has_edge(u, v)? {
                continue 'outer;
            }
        }
        return Ok(Some(u.clone()));
    }
    Ok(None)
}

pub fn check_mixed_monotone_multi<M: CoupledMultiMap + ?Sized>(
    map: &M,
    graph: &Digraph,
    sampler: &SampleSpec,
) -> Result<Certificate> {
    let samples = edge_triples(graph, sampler)?;
    let mut cert = CertificateBuilder::new(Property::MixedMonotoneMulti, Some(sampler.seed));
    for (i, [a, b, c]) in samples.iter().enumerate() {
        let (from, to) = (map.eval(a, c)?, map.eval(b, c)?);
        if let Some(u) = every_has_edge_into(graph, from.points(), to.points())? {
            cert.violation(Violation {
                index: i,
                points: vec![a.clone(), b.clone(), c.clone(), u],
                measured: vec![],
                detail: "first argument: u ∈ F(x1,y) has no edge into F(x2,y)".into(),
            });
        }
        let (from, to) = (map.eval(c, b)?, map.eval(c, a)?);
        if let Some(u) = every_has_edge_into(graph, from.points(), to.points())? {
            cert.violation(Violation {
                index: i,
                points: vec![a.clone(), b.clone(), c.clone(), u],
                measured: vec![],
                detail: "second argument: u ∈ F(x,y2) has no edge into F(x,y1)".into(),
            });
        }
    }
    Ok(cert.finish(samples.len()))
}

struct ContractionSample {
    lhs: f64,
    denominator: f64,
}

fn contraction_terms<M: CoupledMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    a: &PairPoint,
    b: &PairPoint,
) -> Result<ContractionSample> {
    let fa = map.eval(&a.first, &a.second)?;
    let fb = map.eval(&b.first, &b.second)?;
    Ok(ContractionSample {
        lhs: space.distance(&fa, &fb)?,
        denominator: space.distance(&a.first, &b.first)? + space.distance(&a.second, &b.second)?,
    })
}

fn sup_ratio(acc: Option<f64>, lhs: f64, denominator: f64) -> Option<f64> {
    if denominator > 0.0 {
        let r = 2.0 * lhs / denominator;
        Some(acc.map_or(r, |m| m.max(r)))
    } else {
        acc
    }
}

/// Checks `d(F(x,y), F(u,v)) ≤ k/2 [d(x,u) + d(y,v)]` on sampled product
/// edges. The certificate also carries the sample estimate of the smallest
/// admissible `k`.
pub fn check_contraction<M: CoupledMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    graph: &Digraph,
    k: f64,
    sampler: &SampleSpec,
) -> Result<Certificate> {
    validate_k(k)?;
    let samples = product_edge_samples(graph, sampler)?;
    let mut cert = CertificateBuilder::new(Property::GraphContraction, Some(sampler.seed));
    let mut estimate = None;
    for (i, (a, b)) in samples.iter().enumerate() {
        let t = contraction_terms(map, space, a, b)?;
        let rhs = 0.5 * k * t.denominator;
        if t.lhs > rhs + INEQUALITY_SLACK {
            cert.violation(Violation {
                index: i,
                points: vec![
                    a.first.clone(),
                    a.second.clone(),
                    b.first.clone(),
                    b.second.clone(),
                ],
                measured: vec![t.lhs, rhs],
                detail: "d(F(x,y), F(u,v)) exceeds k/2 [d(x,u) + d(y,v)]".into(),
            });
        }
        estimate = sup_ratio(estimate, t.lhs, t.denominator);
    }
    cert.estimate(estimate);
    Ok(cert.finish(samples.len()))
}

/// Sample supremum of `2 d(F(x,y), F(u,v)) / [d(x,u) + d(y,v)]` over product
/// edges with a positive denominator. A lower bound on the least admissible
/// contraction constant.
pub fn estimate_k<M: CoupledMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    graph: &Digraph,
    sampler: &SampleSpec,
) -> Result<f64> {
    let samples = product_edge_samples(graph, sampler)?;
    let mut estimate = None;
    for (a, b) in &samples {
        let t = contraction_terms(map, space, a, b)?;
        estimate = sup_ratio(estimate, t.lhs, t.denominator);
    }
    estimate.ok_or_else(|| {
        Error::InsufficientSamples("every sampled product edge had zero length".into())
    })
}

/// Worst point of `F(x,y)` measured against `F(u,v)`: the largest
/// `d(a, F(u,v))` over `a ∈ F(x,y)`, with the offending `a`.
fn multi_contraction_terms<M: CoupledMultiMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    a: &PairPoint,
    b: &PairPoint,
) -> Result<(Point, ContractionSample)> {
    let fa = map.eval(&a.first, &a.second)?;
    let fb = map.eval(&b.first, &b.second)?;
    let mut worst = (fa.points()[0].clone(), f64::NEG_INFINITY);
    for p in fa.points() {
        let d = dist_to_set(space, p, &fb)?;
        if d > worst.1 {
            worst = (p.clone(), d);
        }
    }
    let denominator = space.distance(&a.first, &b.first)? + space.distance(&a.second, &b.second)?;
    Ok((
        worst.0,
        ContractionSample {
            lhs: worst.1,
            denominator,
        },
    ))
}

/// For every `a ∈ F(x,y)` on a sampled product edge, some `b ∈ F(u,v)` lies
/// within `k/2 [d(x,u) + d(y,v)]`. The existential is realized by the nearest
/// point.
pub fn check_multi_contraction<M: CoupledMultiMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    graph: &Digraph,
    k: f64,
    sampler: &SampleSpec,
) -> Result<Certificate> {
    validate_k(k)?;
    let samples = product_edge_samples(graph, sampler)?;
    let mut cert = CertificateBuilder::new(Property::MultiGraphContraction, Some(sampler.seed));
    let mut estimate = None;
    for (i, (a, b)) in samples.iter().enumerate() {
        let (worst, t) = multi_contraction_terms(map, space, a, b)?;
        let rhs = 0.5 * k * t.denominator;
        if t.lhs > rhs + INEQUALITY_SLACK {
            cert.violation(Violation {
                index: i,
                points: vec![
                    a.first.clone(),
                    a.second.clone(),
                    b.first.clone(),
                    b.second.clone(),
                    worst,
                ],
                measured: vec![t.lhs, rhs],
                detail: "some a ∈ F(x,y) is farther than k/2 [d(x,u) + d(y,v)] from F(u,v)".into(),
            });
        }
        estimate = sup_ratio(estimate, t.lhs, t.denominator);
    }
    cert.estimate(estimate);
    Ok(cert.finish(samples.len()))
}

/// Set-valued counterpart of [`estimate_k`].
pub fn estimate_k_multi<M: CoupledMultiMap + ?Sized>(
    map: &M,
    space: &MetricSpace,
    graph: &Digraph,
    sampler: &SampleSpec,
) -> Result<f64> {
    let samples = product_edge_samples(graph, sampler)?;
    let mut estimate = None;
    for (a, b) in &samples {
        let (_, t) = multi_contraction_terms(map, space, a, b)?;
        estimate = sup_ratio(estimate, t.lhs, t.denominator);
    }
    estimate.ok_or_else(|| {
        Error::InsufficientSamples("every sampled product edge had zero length".into())
    })
}
