//! Python bindings: `import distgap`.

use distgap::cayley::{self, AbelianGroup};
use distgap::certify;
use distgap::cheeger::{self, classify_equality};
use distgap::graph::{bfs_apsp, parse_graph6};
use distgap::metric::validate_metric;
use distgap::spectral::{ndl_spectrum, spectral_gap, DEFAULT_TOL};
use distgap::Value;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: distgap::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Exact(r) => py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),)),
        Value::Real(x) => Ok(x.into_pyobject(py)?.into_any()),
    }
}

/// Simple undirected graph on vertices `0..n`.
#[pyclass(name = "Graph", module = "distgap", frozen)]
struct PyGraph {
    inner: distgap::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self { inner: distgap::Graph::from_edges(n, edges).map_err(err)? })
    }

    #[staticmethod]
    fn from_graph6(s: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_graph6(s.trim().as_bytes()).map_err(err)? })
    }

    #[staticmethod]
    fn path(n: usize) -> Self {
        Self { inner: distgap::Graph::path(n) }
    }

    #[staticmethod]
    fn cycle(n: usize) -> Self {
        Self { inner: distgap::Graph::cycle(n) }
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        Self { inner: distgap::Graph::complete(n) }
    }

    #[staticmethod]
    fn complete_bipartite(a: usize, b: usize) -> Self {
        Self { inner: distgap::Graph::complete_bipartite(a, b) }
    }

    #[staticmethod]
    fn barbell(k: usize, path_len: usize) -> Self {
        Self { inner: distgap::Graph::barbell(k, path_len) }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn graph6(&self) -> String {
        self.inner.to_graph6()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn distance_matrix(&self) -> PyResult<Vec<Vec<u64>>> {
        Ok(bfs_apsp(&self.inner).map_err(err)?.to_rows())
    }

    /// Eigenvalues of the normalized distance Laplacian, ascending.
    fn spectrum(&self) -> PyResult<Vec<f64>> {
        let d = bfs_apsp(&self.inner).map_err(err)?;
        Ok(ndl_spectrum(&d, DEFAULT_TOL).map_err(err)?.eigenvalues)
    }

    fn gap(&self) -> PyResult<f64> {
        let d = bfs_apsp(&self.inner).map_err(err)?;
        Ok(spectral_gap(&ndl_spectrum(&d, DEFAULT_TOL).map_err(err)?))
    }

    /// `(h, optimal subset)` with `h` a `fractions.Fraction`.
    fn cheeger<'py>(&self, py: Python<'py>) -> PyResult<(Bound<'py, PyAny>, Vec<usize>)> {
        let d = bfs_apsp(&self.inner).map_err(err)?;
        let res = cheeger::cheeger_exact(&d, &d.transmission()).map_err(err)?;
        Ok((fraction(py, &res.h)?, res.cut.vertices()))
    }

    /// Equality class for the worst-case Cheeger bound, e.g. `"K_{2,2}"` or `"none"`.
    fn classify(&self) -> String {
        classify_equality(&self.inner).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Spectrum of the normalized distance Laplacian of a finite metric.
#[pyfunction]
fn metric_spectrum(rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let m = validate_metric(rows).map_err(err)?;
    Ok(ndl_spectrum(m.distances(), DEFAULT_TOL).map_err(err)?.eigenvalues)
}

/// Closed-form spectrum of `Cay(group, conn)`, e.g. `cayley_spectrum("Z3xZ3", "(1,0),(2,0),(0,1),(0,2)")`.
#[pyfunction]
fn cayley_spectrum(group: &str, conn: &str) -> PyResult<Vec<f64>> {
    let gr = AbelianGroup::parse(group).map_err(err)?;
    let s = gr.parse_connection_set(conn).map_err(err)?;
    let g = cayley::cayley_graph(&gr, &s).map_err(err)?;
    let dv = cayley::dvector_from_graph(&gr, &g).map_err(err)?;
    Ok(cayley::cayley_spectrum(&dv).map_err(err)?.eigenvalues)
}

#[pyfunction]
fn c1() -> f64 {
    cayley::c1()
}

/// `(A, B, max)` of the quadratic form on the unit circle.
#[pyfunction]
fn ab_optimum() -> (f64, f64, f64) {
    certify::ab_optimum()
}

#[pyfunction]
fn cheeger_lower_bound(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    if n < 2 {
        return Err(PyValueError::new_err("n must be at least 2"));
    }
    fraction(py, &Value::Exact(cheeger::cheeger_lower_bound(n)))
}

/// The pairwise form in `y` that is nonnegative for every metric and balanced `y`.
#[pyfunction]
fn semidefinite_form(rows: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<f64> {
    let m = validate_metric(rows).map_err(err)?;
    certify::semidefinite_form(m.distances(), &y).map_err(err)
}

#[pymodule]
#[pyo3(name = "distgap")]
fn distgap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(metric_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(cayley_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(c1, m)?)?;
    m.add_function(wrap_pyfunction!(ab_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(cheeger_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(semidefinite_form, m)?)?;
    m.add("GAP_FLOOR", distgap::constants::GAP_FLOOR)?;
    Ok(())
}
