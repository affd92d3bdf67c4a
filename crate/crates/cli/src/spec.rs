//! JSON problem specifications.

use std::sync::Arc;

use coupled_fpi_core::{
    componentwise, CoupledMap, CoupledMultiMap, Digraph, FnMultiMap, MetricSpace, Mode, Point,
    Problem, ProblemMap, SampleSpec, SolveConfig,
};
use serde::{Deserialize, Serialize};

use crate::expr::ExprMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field} {message}")]
    Field { field: String, message: String },
}

fn field_err<T>(field: impl Into<String>, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError::Field {
        field: field.into(),
        message: message.into(),
    })
}

/// A scalar (dimension 1) or a coordinate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl PointSpec {
    fn to_point(&self, dim: usize, field: &str) -> Result<Point, SpecError> {
        let coords = match self {
            PointSpec::Scalar(v) if dim == 1 => vec![*v],
            PointSpec::Scalar(_) => {
                return field_err(field, format!("must be a list of {dim} coordinates"))
            }
            PointSpec::Vector(v) if v.len() == dim => v.clone(),
            PointSpec::Vector(v) => {
                return field_err(
                    field,
                    format!("has {} coordinates, expected {dim}", v.len()),
                )
            }
        };
        if coords.iter().any(|c| !c.is_finite()) {
            return field_err(field, "must be finite");
        }
        Ok(Point::new(coords))
    }

    /// Like `to_point`, but a scalar is repeated in every coordinate.
    fn broadcast(&self, dim: usize, field: &str) -> Result<Vec<f64>, SpecError> {
        match self {
            PointSpec::Scalar(v) => PointSpec::Vector(vec![*v; dim]).to_point(dim, field),
            v => v.to_point(dim, field),
        }
        .map(Point::into_coords)
    }
}

impl From<f64> for PointSpec {
    fn from(v: f64) -> Self {
        PointSpec::Scalar(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    /// Euclidean metric; the absolute value in dimension 1.
    #[default]
    Euclidean,
    /// Max-coordinate metric.
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default)]
    pub kind: SpaceKind,
    #[serde(default = "one")]
    pub dimension: usize,
}

fn one() -> usize {
    1
}

impl Default for SpaceSpec {
    fn default() -> Self {
        SpaceSpec {
            kind: SpaceKind::Euclidean,
            dimension: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    /// Componentwise `≤`.
    Order,
    /// Every ordered pair is an edge.
    Full,
    /// Finite vertex list with index edges; loops are added automatically.
    EdgeList {
        vertices: Vec<PointSpec>,
        edges: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Single,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Builtin {
    /// `a x + b y + c`, componentwise.
    Linear {
        a: f64,
        b: f64,
        #[serde(default)]
        c: f64,
    },
    /// The constant map `value`.
    Constant { value: f64 },
    /// The two-point set `{-(a x + b y), a x + b y}`, componentwise.
    SymmetricLinear { a: f64, b: f64 },
}

impl Builtin {
    fn name(&self) -> &'static str {
        match self {
            Builtin::Linear { .. } => "linear",
            Builtin::Constant { .. } => "constant",
            Builtin::SymmetricLinear { .. } => "symmetric_linear",
        }
    }

    fn kind(&self) -> MapKind {
        match self {
            Builtin::Linear { .. } | Builtin::Constant { .. } => MapKind::Single,
            Builtin::SymmetricLinear { .. } => MapKind::Multi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub kind: MapKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<Builtin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    pub x0: PointSpec,
    pub y0: PointSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<PointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1: Option<PointSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSpec {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "yes")]
    pub check_bounds: bool,
    #[serde(default = "yes")]
    pub record_edges: bool,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    10_000
}

fn yes() -> bool {
    true
}

impl Default for SolveSpec {
    fn default() -> Self {
        SolveSpec {
            tol: default_tol(),
            max_iter: default_max_iter(),
            mode: Mode::Continuous,
            check_bounds: true,
            record_edges: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    /// Box bounds; a scalar applies to every coordinate. Ignored for
    /// edge-list graphs, which sample their vertices.
    #[serde(default = "default_lower")]
    pub lower: PointSpec,
    #[serde(default = "default_upper")]
    pub upper: PointSpec,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
}

fn default_lower() -> PointSpec {
    PointSpec::Scalar(-10.0)
}

fn default_upper() -> PointSpec {
    PointSpec::Scalar(10.0)
}

fn default_count() -> usize {
    10_000
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            lower: default_lower(),
            upper: default_upper(),
            count: default_count(),
            rng_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub id: String,
    #[serde(default)]
    pub space: SpaceSpec,
    pub graph: GraphSpec,
    pub map: MapSpec,
    /// Assert that the map is continuous.
    #[serde(default)]
    pub continuous: bool,
    pub k: f64,
    pub seed: SeedSpec,
    #[serde(default)]
    pub solve: SolveSpec,
    #[serde(default)]
    pub sampler: SamplerSpec,
}

/// Parses and validates a JSON problem specification.
pub fn parse_spec(text: &str) -> Result<ProblemSpec, SpecError> {
    let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| SpecError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    spec.validate()?;
    Ok(spec)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// A validated spec turned into solver inputs. The sampler seed is left at
/// zero; the caller decides it.
pub struct Compiled {
    pub problem: Problem,
    pub sampler: SampleSpec,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        self.compile().map(|_| ())
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension
    }

    pub fn compile(&self) -> Result<Compiled, SpecError> {
        let dim = self.space.dimension;
        if dim == 0 {
            return field_err("space.dimension", "must be at least 1");
        }
        if !(self.k > 0.0 && self.k < 1.0) {
            return field_err("k", "must lie in (0,1)");
        }
        if !(self.solve.tol > 0.0 && self.solve.tol.is_finite()) {
            return field_err("solve.tol", "must be positive");
        }
        if self.solve.max_iter == 0 {
            return field_err("solve.max_iter", "must be at least 1");
        }
        let space = match self.space.kind {
            SpaceKind::Euclidean => MetricSpace::euclidean(dim),
            SpaceKind::Chebyshev => MetricSpace::chebyshev(dim),
        }
        .or_else(|e| field_err("space", e.to_string()))?;

        let (graph, vertices) = self.graph(dim)?;
        let map = self.map(dim)?;

        let x0 = self.seed.x0.to_point(dim, "seed.x0")?;
        let y0 = self.seed.y0.to_point(dim, "seed.y0")?;
        let (x1, y1) = match self.map.kind {
            MapKind::Single => (None, None),
            MapKind::Multi => {
                let get = |p: &Option<PointSpec>, field: &str| match p {
                    Some(p) => p.to_point(dim, field).map(Some),
                    None => field_err(field, "is required for multi maps"),
                };
                (
                    get(&self.seed.x1, "seed.x1")?,
                    get(&self.seed.y1, "seed.y1")?,
                )
            }
        };

        let solve = SolveConfig::new(self.k, self.solve.tol)
            .or_else(|e| field_err("solve", e.to_string()))?
            .max_iter(self.solve.max_iter)
            .mode(self.solve.mode)
            .check_bounds(self.solve.check_bounds)
            .record_edges(self.solve.record_edges);

        if self.sampler.count == 0 {
            return field_err("sampler.count", "must be at least 1");
        }
        let sampler = match vertices {
            Some(vertices) => SampleSpec::from_points(vertices, self.sampler.count, 0),
            None => {
                let lower = self.sampler.lower.broadcast(dim, "sampler.lower")?;
                let upper = self.sampler.upper.broadcast(dim, "sampler.upper")?;
                if lower.iter().zip(&upper).any(|(lo, hi)| lo > hi) {
                    return field_err("sampler", "lower bound exceeds upper bound");
                }
                SampleSpec::uniform_box(lower, upper, self.sampler.count, 0)
            }
        };

        Ok(Compiled {
            problem: Problem {
                id: self.id.clone(),
                space,
                graph,
                map,
                continuous: self.continuous,
                x0,
                y0,
                x1,
                y1,
                solve,
            },
            sampler,
        })
    }

    fn graph(&self, dim: usize) -> Result<(Digraph, Option<Vec<Point>>), SpecError> {
        match &self.graph {
            GraphSpec::Order => Ok((Digraph::order(), None)),
            GraphSpec::Full => Ok((Digraph::full(), None)),
            GraphSpec::EdgeList { vertices, edges } => {
                let points = vertices
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.to_point(dim, &format!("graph.vertices[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                for (i, &(a, b)) in edges.iter().enumerate() {
                    if a >= points.len() || b >= points.len() {
                        return field_err(
                            format!("graph.edges[{i}]"),
                            format!("references a vertex outside 0..{}", points.len()),
                        );
                    }
                }
                let g = Digraph::from_index_edges(points.clone(), edges)
                    .or_else(|e| field_err("graph", e.to_string()))?;
                Ok((g, Some(points)))
            }
        }
    }

    fn map(&self, dim: usize) -> Result<ProblemMap, SpecError> {
        let multi = self.map.kind == MapKind::Multi;
        match (&self.map.expression, &self.map.builtin) {
            (Some(src), None) => {
                let m = ExprMap::compile(src, dim, multi)
                    .or_else(|e| field_err("map.expression", format!("is invalid at {e}")))?;
                Ok(if multi {
                    ProblemMap::Multi(Arc::new(m))
                } else {
                    ProblemMap::Single(Arc::new(m))
                })
            }
            (None, Some(b)) => {
                if b.kind() != self.map.kind {
                    return field_err(
                        "map.builtin",
                        format!("'{}' does not match map kind", b.name()),
                    );
                }
                if !builtin_params_finite(b) {
                    return field_err("map.builtin", "parameters must be finite");
                }
                Ok(builtin_map(b))
            }
            _ => field_err("map", "needs exactly one of expression or builtin"),
        }
    }
}

fn builtin_params_finite(b: &Builtin) -> bool {
    match *b {
        Builtin::Linear { a, b, c } => [a, b, c].iter().all(|v| v.is_finite()),
        Builtin::Constant { value } => value.is_finite(),
        Builtin::SymmetricLinear { a, b } => a.is_finite() && b.is_finite(),
    }
}

fn builtin_map(b: &Builtin) -> ProblemMap {
    match *b {
        Builtin::Linear { a, b, c } => {
            let m: Arc<dyn CoupledMap> = Arc::new(componentwise(move |x, y| a * x + b * y + c));
            ProblemMap::Single(m)
        }
        Builtin::Constant { value } => {
            let m: Arc<dyn CoupledMap> = Arc::new(componentwise(move |_, _| value));
            ProblemMap::Single(m)
        }
        Builtin::SymmetricLinear { a, b } => {
            let f = componentwise(move |x, y| a * x + b * y);
            let m: Arc<dyn CoupledMultiMap> = Arc::new(FnMultiMap(move |x: &Point, y: &Point| {
                let p = CoupledMap::eval(&f, x, y).expect("dimensions checked by the solver");
                let neg = Point::new(p.coords().iter().map(|c| -c).collect());
                vec![neg, p]
            }));
            ProblemMap::Multi(m)
        }
    }
}
