//! Python bindings. Points are floats (dimension 1) or lists of floats; maps
//! are Python callables `f(x, y)` returning a point, or a list of points for
//! set-valued maps.

use core::{CoupledMap, CoupledMultiMap, FiniteSet, MetricSpace, Point, SampleSpec, SolveConfig};
use coupled_fpi_core as core;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyList;

fn to_py(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point(obj: &Bound<'_, PyAny>) -> PyResult<Point> {
    if let Ok(v) = obj.extract::<f64>() {
        return Ok(Point::scalar(v));
    }
    obj.extract::<Vec<f64>>()
        .map(Point::new)
        .map_err(|_| PyValueError::new_err("a point is a float or a list of floats"))
}

fn points(obj: &Bound<'_, PyAny>) -> PyResult<Vec<Point>> {
    obj.try_iter()?.map(|item| point(&item?)).collect()
}

fn set(obj: &Bound<'_, PyAny>) -> PyResult<FiniteSet> {
    FiniteSet::new(points(obj)?).map_err(to_py)
}

/// Scalars come back as floats, vectors as lists.
fn out(py: Python<'_>, p: &Point) -> PyResult<Py<PyAny>> {
    Ok(match p.coords() {
        [v] => v.into_pyobject(py)?.into_any().unbind(),
        c => PyList::new(py, c)?.into_any().unbind(),
    })
}

fn space(metric: &str, dim: usize) -> PyResult<MetricSpace> {
    match metric {
        "euclidean" => MetricSpace::euclidean(dim),
        "chebyshev" => MetricSpace::chebyshev(dim),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown metric '{other}' (expected 'euclidean' or 'chebyshev')"
            )))
        }
    }
    .map_err(to_py)
}

struct PyMap(Py<PyAny>);

impl PyMap {
    fn call<T>(
        &self,
        x: &Point,
        y: &Point,
        convert: impl FnOnce(&Bound<'_, PyAny>) -> PyResult<T>,
    ) -> core::Result<T> {
        Python::attach(|py| {
            let r = self.0.call1(py, (out(py, x)?, out(py, y)?))?.into_bound(py);
            convert(&r)
        })
        .map_err(|e: PyErr| core::Error::Map(e.to_string()))
    }
}

impl CoupledMap for PyMap {
    fn eval(&self, x: &Point, y: &Point) -> core::Result<Point> {
        self.call(x, y, point)
    }
}

impl CoupledMultiMap for PyMap {
    fn eval(&self, x: &Point, y: &Point) -> core::Result<FiniteSet> {
        let pts = self.call(x, y, points)?;
        FiniteSet::new(pts)
    }
}

/// A reflexive directed graph on points.
#[pyclass(name = "Graph", module = "coupled_fpi", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph(core::Digraph);

#[pymethods]
impl PyGraph {
    /// Componentwise `<=`.
    #[staticmethod]
    fn order() -> Self {
        PyGraph(core::Digraph::order())
    }

    #[staticmethod]
    fn full() -> Self {
        PyGraph(core::Digraph::full())
    }

    /// Finite graph from a vertex list and `(i, j)` index edges.
    #[staticmethod]
    fn edge_list(vertices: &Bound<'_, PyAny>, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        core::Digraph::from_index_edges(points(vertices)?, &edges)
            .map(PyGraph)
            .map_err(to_py)
    }

    fn reversed(&self) -> Self {
        PyGraph(self.0.reversed())
    }

    fn symmetrized(&self) -> Self {
        PyGraph(self.0.symmetrized())
    }

    fn has_edge(&self, p: &Bound<'_, PyAny>, q: &Bound<'_, PyAny>) -> PyResult<bool> {
        self.0.has_edge(&point(p)?, &point(q)?).map_err(to_py)
    }

    fn is_weakly_connected(&self) -> PyResult<bool> {
        self.0.is_weakly_connected().map_err(to_py)
    }

    fn is_path(&self, vertices: &Bound<'_, PyAny>) -> PyResult<bool> {
        let q = core::PathQuery::new(points(vertices)?).map_err(to_py)?;
        core::is_path(&self.0, &q).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Graph({})", self.0.name())
    }
}

fn graph_or_order(graph: Option<&PyGraph>) -> core::Digraph {
    graph.map_or_else(core::Digraph::order, |g| g.0.clone())
}

/// Result of a sampled hypothesis check.
#[pyclass(name = "Certificate", module = "coupled_fpi", frozen, get_all)]
struct PyCertificate {
    property: String,
    outcome: String,
    passed: bool,
    samples_tested: usize,
    estimated_constant: Option<f64>,
    violation_count: usize,
    /// Points of the first witness, if any.
    witness: Option<Vec<Vec<f64>>>,
    witness_detail: Option<String>,
}

fn snake<T: std::fmt::Debug>(v: &T) -> String {
    let mut s = String::new();
    for (i, c) in format!("{v:?}").chars().enumerate() {
        if c.is_uppercase() {
            if i > 0 {
                s.push('_');
            }
            s.extend(c.to_lowercase());
        } else {
            s.push(c);
        }
    }
    s
}

impl From<core::Certificate> for PyCertificate {
    fn from(c: core::Certificate) -> Self {
        let first = c.first_violation();
        PyCertificate {
            property: snake(&c.property),
            outcome: snake(&c.outcome),
            passed: c.passed(),
            samples_tested: c.samples_tested,
            estimated_constant: c.estimated_constant,
            violation_count: c.violation_count,
            witness: first.map(|v| v.points.iter().map(|p| p.coords().to_vec()).collect()),
            witness_detail: first.map(|v| v.detail.clone()),
        }
    }
}

#[pymethods]
impl PyCertificate {
    fn __repr__(&self) -> String {
        format!(
            "Certificate({}, {}, samples={})",
            self.property, self.outcome, self.samples_tested
        )
    }
}

/// A solver run: the returned pair and the recorded trace.
#[pyclass(name = "Solution", module = "coupled_fpi", frozen)]
struct PySolution(core::Solution);

#[pymethods]
impl PySolution {
    #[getter]
    fn x(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        out(py, &self.0.fixed_point.x)
    }

    #[getter]
    fn y(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        out(py, &self.0.fixed_point.y)
    }

    #[getter]
    fn is_diagonal(&self) -> bool {
        self.0.fixed_point.is_diagonal
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged()
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.0.trace.residual
    }

    #[getter]
    fn d0(&self) -> f64 {
        self.0.trace.d0
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.trace.len()
    }

    /// Trace rows `(n, x, y, step_x, step_y, bound, diag)`.
    #[allow(clippy::type_complexity)]
    fn steps(
        &self,
        py: Python<'_>,
    ) -> PyResult<Vec<(usize, Py<PyAny>, Py<PyAny>, f64, f64, f64, f64)>> {
        self.0
            .trace
            .steps
            .iter()
            .map(|s| {
                Ok((
                    s.n,
                    out(py, &s.x)?,
                    out(py, &s.y)?,
                    s.step_x,
                    s.step_y,
                    s.bound,
                    s.diag,
                ))
            })
            .collect()
    }

    /// Checks `d(x_n, y_n) <= k^n d(x_0, y_0)` along the trace.
    fn diagonal_decay(&self, graph: &PyGraph) -> PyResult<PyCertificate> {
        core::diagonal_decay_check(&self.0.trace, &graph.0, self.0.trace.k)
            .map(Into::into)
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let fp = &self.0.fixed_point;
        format!(
            "Solution(x={}, y={}, converged={}, iterations={})",
            fp.x,
            fp.y,
            self.0.converged(),
            self.0.trace.len()
        )
    }
}

fn config(
    k: f64,
    tol: f64,
    max_iter: usize,
    check_bounds: bool,
    record_edges: bool,
) -> PyResult<SolveConfig> {
    Ok(SolveConfig::new(k, tol)
        .map_err(to_py)?
        .max_iter(max_iter)
        .check_bounds(check_bounds)
        .record_edges(record_edges))
}

/// Coupled iteration `x <- F(x, y)`, `y <- F(y, x)` from `(x0, y0)`.
#[pyfunction]
#[pyo3(signature = (f, x0, y0, k, tol=1e-10, max_iter=10_000, graph=None, metric="euclidean", check_bounds=true, record_edges=false))]
#[allow(clippy::too_many_arguments)]
fn solve_coupled(
    py: Python<'_>,
    f: Py<PyAny>,
    x0: &Bound<'_, PyAny>,
    y0: &Bound<'_, PyAny>,
    k: f64,
    tol: f64,
    max_iter: usize,
    graph: Option<&PyGraph>,
    metric: &str,
    check_bounds: bool,
    record_edges: bool,
) -> PyResult<PySolution> {
    let (x0, y0) = (point(x0)?, point(y0)?);
    let sp = space(metric, x0.dim())?;
    let g = graph_or_order(graph);
    let cfg = config(k, tol, max_iter, check_bounds, record_edges)?;
    let map = PyMap(f);
    py.detach(|| core::solve_coupled(&map, &sp, &g, &x0, &y0, &cfg))
        .map(PySolution)
        .map_err(to_py)
}

/// Set-valued coupled iteration with first iterates `x1 in F(x0, y0)` and
/// `y1 in F(y0, x0)`.
#[pyfunction]
#[pyo3(signature = (f, x0, y0, x1, y1, k, tol=1e-10, max_iter=10_000, graph=None, metric="euclidean", check_bounds=true, record_edges=false))]
#[allow(clippy::too_many_arguments)]
fn solve_coupled_multi(
    py: Python<'_>,
    f: Py<PyAny>,
    x0: &Bound<'_, PyAny>,
    y0: &Bound<'_, PyAny>,
    x1: &Bound<'_, PyAny>,
    y1: &Bound<'_, PyAny>,
    k: f64,
    tol: f64,
    max_iter: usize,
    graph: Option<&PyGraph>,
    metric: &str,
    check_bounds: bool,
    record_edges: bool,
) -> PyResult<PySolution> {
    let (x0, y0, x1, y1) = (point(x0)?, point(y0)?, point(x1)?, point(y1)?);
    let sp = space(metric, x0.dim())?;
    let g = graph_or_order(graph);
    let cfg = config(k, tol, max_iter, check_bounds, record_edges)?;
    let map = PyMap(f);
    py.detach(|| core::solve_coupled_multi(&map, &sp, &g, &x0, &y0, &x1, &y1, &cfg))
        .map(PySolution)
        .map_err(to_py)
}

fn bounds(v: &Bound<'_, PyAny>, dim: usize) -> PyResult<Vec<f64>> {
    match v.extract::<f64>() {
        Ok(s) => Ok(vec![s; dim]),
        Err(_) => v.extract::<Vec<f64>>(),
    }
}

fn sampler(
    lower: &Bound<'_, PyAny>,
    upper: &Bound<'_, PyAny>,
    dim: usize,
    count: usize,
    seed: u64,
) -> PyResult<SampleSpec> {
    Ok(SampleSpec::uniform_box(
        bounds(lower, dim)?,
        bounds(upper, dim)?,
        count,
        seed,
    ))
}

/// Samples edge-related triples and tests both monotonicity clauses.
#[pyfunction]
#[pyo3(signature = (f, graph=None, lower=None, upper=None, dim=1, count=10_000, seed=0, multi=false))]
#[allow(clippy::too_many_arguments)]
fn check_mixed_monotone(
    py: Python<'_>,
    f: Py<PyAny>,
    graph: Option<&PyGraph>,
    lower: Option<&Bound<'_, PyAny>>,
    upper: Option<&Bound<'_, PyAny>>,
    dim: usize,
    count: usize,
    seed: u64,
    multi: bool,
) -> PyResult<PyCertificate> {
    let s = default_sampler(py, lower, upper, dim, count, seed)?;
    let g = graph_or_order(graph);
    let map = PyMap(f);
    py.detach(|| {
        if multi {
            core::check_mixed_monotone_multi(&map, &g, &s)
        } else {
            core::check_mixed_monotone(&map, &g, &s)
        }
    })
    .map(Into::into)
    .map_err(to_py)
}

fn default_sampler(
    py: Python<'_>,
    lower: Option<&Bound<'_, PyAny>>,
    upper: Option<&Bound<'_, PyAny>>,
    dim: usize,
    count: usize,
    seed: u64,
) -> PyResult<SampleSpec> {
    let lo = match lower {
        Some(v) => v.clone(),
        None => (-10.0f64).into_pyobject(py)?.into_any(),
    };
    let hi = match upper {
        Some(v) => v.clone(),
        None => 10.0f64.into_pyobject(py)?.into_any(),
    };
    sampler(&lo, &hi, dim, count, seed)
}

/// Tests `d(F(x,y), F(u,v)) <= k/2 [d(x,u) + d(y,v)]` on sampled product
/// edges (the set-valued form if `multi`).
#[pyfunction]
#[pyo3(signature = (f, k, graph=None, lower=None, upper=None, dim=1, count=10_000, seed=0, metric="euclidean", multi=false))]
#[allow(clippy::too_many_arguments)]
fn check_contraction(
    py: Python<'_>,
    f: Py<PyAny>,
    k: f64,
    graph: Option<&PyGraph>,
    lower: Option<&Bound<'_, PyAny>>,
    upper: Option<&Bound<'_, PyAny>>,
    dim: usize,
    count: usize,
    seed: u64,
    metric: &str,
    multi: bool,
) -> PyResult<PyCertificate> {
    let s = default_sampler(py, lower, upper, dim, count, seed)?;
    let sp = space(metric, dim)?;
    let g = graph_or_order(graph);
    let map = PyMap(f);
    py.detach(|| {
        if multi {
            core::check_multi_contraction(&map, &sp, &g, k, &s)
        } else {
            core::check_contraction(&map, &sp, &g, k, &s)
        }
    })
    .map(Into::into)
    .map_err(to_py)
}

/// Sample lower bound on the least admissible contraction constant.
#[pyfunction]
#[pyo3(signature = (f, graph=None, lower=None, upper=None, dim=1, count=10_000, seed=0, metric="euclidean", multi=false))]
#[allow(clippy::too_many_arguments)]
fn estimate_k(
    py: Python<'_>,
    f: Py<PyAny>,
    graph: Option<&PyGraph>,
    lower: Option<&Bound<'_, PyAny>>,
    upper: Option<&Bound<'_, PyAny>>,
    dim: usize,
    count: usize,
    seed: u64,
    metric: &str,
    multi: bool,
) -> PyResult<f64> {
    let s = default_sampler(py, lower, upper, dim, count, seed)?;
    let sp = space(metric, dim)?;
    let g = graph_or_order(graph);
    let map = PyMap(f);
    py.detach(|| {
        if multi {
            core::estimate_k_multi(&map, &sp, &g, &s)
        } else {
            core::estimate_k(&map, &sp, &g, &s)
        }
    })
    .map_err(to_py)
}

/// Tests that edges along a convergent sequence reach its limit.
#[pyfunction]
#[pyo3(signature = (sequence, limit, graph=None, descending=false))]
fn check_limit_closure(
    sequence: &Bound<'_, PyAny>,
    limit: &Bound<'_, PyAny>,
    graph: Option<&PyGraph>,
    descending: bool,
) -> PyResult<PyCertificate> {
    let dir = if descending {
        core::Direction::Descending
    } else {
        core::Direction::Ascending
    };
    core::check_limit_closure(
        &graph_or_order(graph),
        &points(sequence)?,
        &point(limit)?,
        dir,
    )
    .map(Into::into)
    .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (p, q, metric="euclidean"))]
fn distance(p: &Bound<'_, PyAny>, q: &Bound<'_, PyAny>, metric: &str) -> PyResult<f64> {
    let (p, q) = (point(p)?, point(q)?);
    space(metric, p.dim())?.distance(&p, &q).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (a, b, metric="euclidean"))]
fn hausdorff(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, metric: &str) -> PyResult<f64> {
    let (a, b) = (set(a)?, set(b)?);
    core::hausdorff(&space(metric, a.dim())?, &a, &b).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (a, b, metric="euclidean"))]
fn dist_to_set(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, metric: &str) -> PyResult<f64> {
    let (a, b) = (point(a)?, set(b)?);
    core::dist_to_set(&space(metric, a.dim())?, &a, &b).map_err(to_py)
}

/// A point of `b` within `hausdorff(a, b) + eps` of `x`, which must lie in `a`.
#[pyfunction]
#[pyo3(signature = (a, b, x, eps, metric="euclidean"))]
fn select_near(
    py: Python<'_>,
    a: &Bound<'_, PyAny>,
    b: &Bound<'_, PyAny>,
    x: &Bound<'_, PyAny>,
    eps: f64,
    metric: &str,
) -> PyResult<Py<PyAny>> {
    let (a, b, x) = (set(a)?, set(b)?, point(x)?);
    let chosen = core::select_near(&space(metric, a.dim())?, &a, &b, &x, eps).map_err(to_py)?;
    out(py, &chosen)
}

#[pyfunction]
fn step_bound(k: f64, d0: f64, n: usize) -> PyResult<f64> {
    core::step_bound(k, d0, n).map_err(to_py)
}

#[pyfunction]
fn tail_bound(k: f64, d0: f64, n: usize) -> PyResult<f64> {
    core::tail_bound(k, d0, n).map_err(to_py)
}

#[pymodule]
fn coupled_fpi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(dist_to_set, m)?)?;
    m.add_function(wrap_pyfunction!(select_near, m)?)?;
    m.add_function(wrap_pyfunction!(step_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(solve_coupled, m)?)?;
    m.add_function(wrap_pyfunction!(solve_coupled_multi, m)?)?;
    m.add_function(wrap_pyfunction!(check_mixed_monotone, m)?)?;
    m.add_function(wrap_pyfunction!(check_contraction, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_k, m)?)?;
    m.add_function(wrap_pyfunction!(check_limit_closure, m)?)?;
    Ok(())
}
