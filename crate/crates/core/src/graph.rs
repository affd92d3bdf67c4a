//! Reflexive directed graphs over the ground space.
//!
//! A [`Digraph`] is either intensional (an edge predicate, every point is a
//! vertex) or extensional (a finite vertex list with an edge list). Loops are
//! implicit in both modes: `has_edge(x, x)` is always true for a vertex `x`.
//!
//! The product graph on `X × X` joins `(x, y)` to `(u, v)` when `(x, u)` and
//! `(v, y)` are edges. The second coordinate is reversed.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::{PairPoint, Point};

pub type EdgePredicate = dyn Fn(&Point, &Point) -> bool + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMode {
    Intensional,
    Extensional,
}

#[derive(Clone)]
pub struct Digraph {
    kind: Arc<GraphKind>,
}

enum GraphKind {
    /// `p → q` iff `p ≤ q` in every coordinate.
    Order,
    Full,
    Predicate(Arc<EdgePredicate>),
    Finite(FiniteGraph),
    Reversed(Digraph),
    Symmetrized(Digraph),
}

struct FiniteGraph {
    vertices: Vec<Point>,
    index: HashMap<Vec<u64>, usize>,
    edges: HashSet<(usize, usize)>,
}

impl FiniteGraph {
    fn vertex(&self, p: &Point) -> Result<usize> {
        self.index
            .get(&p.key())
            .copied()
            .ok_or_else(|| Error::NotAVertex(p.clone()))
    }

    fn has_edge(&self, p: &Point, q: &Point) -> Result<bool> {
        let (i, j) = (self.vertex(p)?, self.vertex(q)?);
        Ok(i == j || self.edges.contains(&(i, j)))
    }
}

impl Digraph {
    /// Coordinatewise order: an edge `p → q` iff `p[i] ≤ q[i]` for every `i`.
    /// Comparison is exact.
    pub fn order() -> Self {
        Self::wrap(GraphKind::Order)
    }

    /// Every ordered pair is an edge.
    pub fn full() -> Self {
        Self::wrap(GraphKind::Full)
    }

    /// Intensional graph from an edge predicate. Loops are added regardless of
    /// what the predicate says on the diagonal.
    pub fn from_predicate<F>(edge: F) -> Self
    where
        F: Fn(&Point, &Point) -> bool + Send + Sync + 'static,
    {
        Self::wrap(GraphKind::Predicate(Arc::new(edge)))
    }

    /// Extensional graph. Every vertex carries a loop; edges must join listed
    /// vertices.
    pub fn from_edges(vertices: Vec<Point>, edges: &[(Point, Point)]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("vertex list is empty".into()));
        }
        let dim = vertices[0].dim();
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            v.expect_dim(dim)?;
            if index.insert(v.key(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate vertex {v}")));
            }
        }
        let mut graph = FiniteGraph {
            vertices,
            index,
            edges: HashSet::with_capacity(edges.len()),
        };
        for (p, q) in edges {
            let e = (graph.vertex(p)?, graph.vertex(q)?);
            graph.edges.insert(e);
        }
        Ok(Self::wrap(GraphKind::Finite(graph)))
    }

    /// Extensional graph with edges given as vertex indices.
    pub fn from_index_edges(vertices: Vec<Point>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = vertices.len();
        let mut pairs = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) references a vertex index outside 0..{n}"
                )));
            }
            pairs.push((vertices[i].clone(), vertices[j].clone()));
        }
        Self::from_edges(vertices, &pairs)
    }

    fn wrap(kind: GraphKind) -> Self {
        Digraph {
            kind: Arc::new(kind),
        }
    }

    /// The converse graph `G⁻¹`.
    pub fn reversed(&self) -> Self {
        Self::wrap(GraphKind::Reversed(self.clone()))
    }

    /// The undirected graph `G̃` with `E(G) ∪ E(G⁻¹)`.
    pub fn symmetrized(&self) -> Self {
        Self::wrap(GraphKind::Symmetrized(self.clone()))
    }

    pub fn mode(&self) -> GraphMode {
        match &*self.kind {
            GraphKind::Finite(_) => GraphMode::Extensional,
            GraphKind::Reversed(g) | GraphKind::Symmetrized(g) => g.mode(),
            _ => GraphMode::Intensional,
        }
    }

    /// The vertex list of an extensional graph.
    pub fn vertices(&self) -> Option<&[Point]> {
        match &*self.kind {
            GraphKind::Finite(g) => Some(&g.vertices),
            GraphKind::Reversed(g) | GraphKind::Symmetrized(g) => g.vertices(),
            _ => None,
        }
    }

    pub fn has_edge(&self, p: &Point, q: &Point) -> Result<bool> {
        match &*self.kind {
            GraphKind::Order => {
                q.expect_dim(p.dim())?;
                Ok(p.coords().iter().zip(q.coords()).all(|(a, b)| a <= b))
            }
            GraphKind::Full => {
                q.expect_dim(p.dim())?;
                Ok(true)
            }
            GraphKind::Predicate(edge) => {
                q.expect_dim(p.dim())?;
                Ok(p == q || edge(p, q))
            }
            GraphKind::Finite(g) => g.has_edge(p, q),
            GraphKind::Reversed(g) => g.has_edge(q, p),
            GraphKind::Symmetrized(g) => Ok(g.has_edge(p, q)? || g.has_edge(q, p)?),
        }
    }

    pub fn is_weakly_connected(&self) -> Result<bool> {
        match &*self.kind {
            GraphKind::Finite(g) => Ok(weakly_connected(g)),
            GraphKind::Reversed(g) | GraphKind::Symmetrized(g) => g.is_weakly_connected(),
            _ => Err(Error::UnsupportedMode),
        }
    }

    pub fn name(&self) -> &'static str {
        match &*self.kind {
            GraphKind::Order => "order",
            GraphKind::Full => "full",
            GraphKind::Predicate(_) => "predicate",
            GraphKind::Finite(_) => "edge_list",
            GraphKind::Reversed(_) => "reversed",
            GraphKind::Symmetrized(_) => "symmetrized",
        }
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.kind {
            GraphKind::Finite(g) => f
                .debug_struct("Digraph")
                .field("kind", &"edge_list")
                .field("vertices", &g.vertices.len())
                .field("edges", &g.edges.len())
                .finish(),
            GraphKind::Reversed(g) => f.debug_tuple("Reversed").field(g).finish(),
            GraphKind::Symmetrized(g) => f.debug_tuple("Symmetrized").field(g).finish(),
            _ => f
                .debug_struct("Digraph")
                .field("kind", &self.name())
                .finish(),
        }
    }
}

/// Edge of the product graph: `(a.first, b.first) ∈ E` and
/// `(b.second, a.second) ∈ E`.
pub fn product_edge(graph: &Digraph, a: &PairPoint, b: &PairPoint) -> Result<bool> {
    let forward = graph.has_edge(&a.first, &b.first)?;
    let backward = graph.has_edge(&b.second, &a.second)?;
    Ok(forward && backward)
}

/// A nonempty vertex sequence to be tested as a directed path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathQuery {
    vertices: Vec<Point>,
}

impl PathQuery {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("path must contain a vertex".into()));
        }
        Ok(PathQuery { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
}

pub fn is_path(graph: &Digraph, query: &PathQuery) -> Result<bool> {
    for w in query.vertices.windows(2) {
        if !graph.has_edge(&w[0], &w[1])? {
            return Ok(false);
        }
    }
    if let [only] = query.vertices.as_slice() {
        // a single vertex is a path of length zero, but it must be a vertex
        graph.has_edge(only, only)?;
    }
    Ok(true)
}

fn weakly_connected(g: &FiniteGraph) -> bool {
    let n = g.vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    let mut components = n;
    for &(a, b) in &g.edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}
