//! Python module `polymin`.
//!
//! Shapes are passed as sequences of `(x, y, z)` tuples. Structured results
//! (search results, certificates, probe reports) come back as plain dicts.

use polymin::convexitylab::{
    convexity_sample, example_singular_base, one_sided_gradient as core_gradient, rigidity_probe as core_rigidity,
    singular_candidates as core_singular, Functional, SurfaceProbe,
};
use polymin::families::{self, ShapeFamily};
use polymin::functionals;
use polymin::poly;
use polymin::search::{self, SearchParams};
use polymin::{Error, Point3};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::DegenerateInput(_) | Error::DuplicatePoint(..) | Error::Parse { .. } => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Converts through JSON so nested results arrive as dicts and lists.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn config(points: Vec<[f64; 3]>) -> PyResult<polymin::Configuration> {
    polymin::Configuration::new(points.into_iter().map(Point3::from_array).collect()).map_err(err)
}

fn tuple(p: Point3) -> (f64, f64, f64) {
    (p.x, p.y, p.z)
}

fn family(name: &str) -> PyResult<ShapeFamily> {
    ShapeFamily::from_name(name).map_err(err)
}

/// Convex hull of a point set with merged coplanar faces.
#[pyclass(module = "polymin", frozen)]
struct HullMesh(polymin::HullMesh);

#[pymethods]
impl HullMesh {
    #[new]
    fn new(points: Vec<[f64; 3]>) -> PyResult<Self> {
        Ok(HullMesh(polymin::convex_hull(&config(points)?).map_err(err)?))
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.0.volume()
    }

    #[getter]
    fn surface_area(&self) -> f64 {
        self.0.surface_area()
    }

    /// `A / V^(2/3)`.
    #[getter]
    fn quality(&self) -> f64 {
        self.0.quality()
    }

    #[getter]
    fn vertices(&self) -> Vec<(f64, f64, f64)> {
        self.0.vertices().iter().map(|&p| tuple(p)).collect()
    }

    /// Triangles as vertex index triples.
    #[getter]
    fn triangles(&self) -> Vec<[usize; 3]> {
        self.0.faces().to_vec()
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.0.merged_face_count()
    }

    /// Sorted vertex degrees over merged faces.
    #[getter]
    fn valency(&self) -> Vec<usize> {
        self.0.valency_vector().as_slice().to_vec()
    }

    #[getter]
    fn all_faces_triangular(&self) -> bool {
        self.0.all_faces_triangular()
    }

    fn to_off(&self) -> String {
        polymin::off::off_string(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("HullMesh(vertices={}, faces={}, quality={})", self.0.vertices().len(), self.0.merged_face_count(), self.0.quality())
    }
}

#[pyfunction]
fn convex_hull(points: Vec<[f64; 3]>) -> PyResult<HullMesh> {
    HullMesh::new(points)
}

/// Randomized search; returns the search result as a dict.
#[pyfunction]
#[pyo3(signature = (n, restarts=8, iterations=2000, seed=0, variance_max=0.5, squeeze_factor=0.98))]
fn search_min(
    py: Python<'_>,
    n: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
    variance_max: f64,
    squeeze_factor: f64,
) -> PyResult<PyObject> {
    let mut p = SearchParams::new(n);
    p.restarts = restarts;
    p.iterations = iterations;
    p.seed = seed;
    p.variance_max = variance_max;
    p.squeeze_factor = squeeze_factor;
    let r = py.allow_threads(|| match search::search(&p) {
        Err(Error::BudgetExhausted(r)) => Ok(*r),
        r => r,
    });
    to_py(py, &r.map_err(err)?)
}

/// Minimizes over all coordinates keeping the valency vector.
#[pyfunction]
#[pyo3(signature = (points, tol=1e-12))]
fn polish(py: Python<'_>, points: Vec<[f64; 3]>, tol: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    let c = config(points)?;
    let out = py.allow_threads(|| search::polish(&c, tol)).map_err(err)?;
    Ok(out.points().iter().map(|&p| tuple(p)).collect())
}

#[pyfunction]
fn family_names() -> Vec<&'static str> {
    families::ALL_FAMILIES.iter().map(|f| f.name()).collect()
}

/// Points of a family member; reference parameters if `params` is omitted.
#[pyfunction]
#[pyo3(signature = (name, params=None))]
fn instantiate(name: &str, params: Option<Vec<f64>>) -> PyResult<Vec<(f64, f64, f64)>> {
    let f = family(name)?;
    let c = families::instantiate(f, &params.unwrap_or_else(|| f.default_params())).map_err(err)?;
    Ok(c.points().iter().map(|&p| tuple(p)).collect())
}

#[pyfunction]
fn family_quality(name: &str, params: Vec<f64>) -> PyResult<f64> {
    families::family_quality(family(name)?, &params).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (name, tol=1e-8))]
fn optimize_family(py: Python<'_>, name: &str, tol: f64) -> PyResult<PyObject> {
    to_py(py, &families::optimize_family(family(name)?, tol).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n, tol=1e-3))]
fn certify_eta(py: Python<'_>, n: usize, tol: f64) -> PyResult<PyObject> {
    to_py(py, &families::certify_eta(n, tol).map_err(err)?)
}

/// Certifies that a published minimal polynomial has a root within `tol`
/// of `value`.
#[pyfunction]
fn verify_minpoly(py: Python<'_>, poly_id: &str, value: f64, tol: f64) -> PyResult<PyObject> {
    let p = poly::published(poly_id).map_err(err)?;
    to_py(py, &poly::verify_minpoly(poly_id, &p, value, tol).map_err(err)?)
}

#[pyfunction]
fn constants(py: Python<'_>) -> PyResult<PyObject> {
    to_py(py, &functionals::constants())
}

#[pyfunction]
fn bipyramid_quality(k: usize) -> PyResult<f64> {
    functionals::bipyramid_quality(k).map_err(err)
}

#[pyfunction]
fn example_singular() -> Vec<(f64, f64, f64)> {
    example_singular_base().points().iter().map(|&p| tuple(p)).collect()
}

#[pyfunction]
fn singular_candidates(py: Python<'_>, base: Vec<[f64; 3]>, level: f64) -> PyResult<PyObject> {
    to_py(py, &core_singular(&config(base)?, level).map_err(err)?)
}

#[pyfunction]
fn one_sided_gradient(base: Vec<[f64; 3]>, point: [f64; 3], direction: [f64; 3]) -> PyResult<(f64, f64, f64)> {
    let g = core_gradient(&config(base)?, Point3::from_array(point), Point3::from_array(direction)).map_err(err)?;
    Ok(tuple(g))
}

/// Midpoint convexity check of the sublevel set `{F <= level}`.
#[pyfunction]
#[pyo3(signature = (base, level, trials=1000, seed=0, functional="area"))]
fn convexity_probe(
    py: Python<'_>,
    base: Vec<[f64; 3]>,
    level: f64,
    trials: usize,
    seed: u64,
    functional: &str,
) -> PyResult<PyObject> {
    let f = match functional {
        "area" => Functional::Area,
        "volume" => Functional::Volume,
        other => return Err(PyValueError::new_err(format!("functional must be 'area' or 'volume', got '{other}'"))),
    };
    let probe = SurfaceProbe::new(config(base)?, f, level).map_err(err)?;
    let r = py.allow_threads(|| convexity_sample(&probe, trials, seed));
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (points, vertex, radius=0.05, trials=50, seed=0))]
fn rigidity_probe(
    py: Python<'_>,
    points: Vec<[f64; 3]>,
    vertex: usize,
    radius: f64,
    trials: usize,
    seed: u64,
) -> PyResult<PyObject> {
    let c = config(points)?;
    let r = py.allow_threads(|| core_rigidity(&c, vertex, radius, trials, seed)).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "polymin")]
fn polymin_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", polymin::VERSION)?;
    m.add_class::<HullMesh>()?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(search_min, m)?)?;
    m.add_function(wrap_pyfunction!(polish, m)?)?;
    m.add_function(wrap_pyfunction!(family_names, m)?)?;
    m.add_function(wrap_pyfunction!(instantiate, m)?)?;
    m.add_function(wrap_pyfunction!(family_quality, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_family, m)?)?;
    m.add_function(wrap_pyfunction!(certify_eta, m)?)?;
    m.add_function(wrap_pyfunction!(verify_minpoly, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(bipyramid_quality, m)?)?;
    m.add_function(wrap_pyfunction!(example_singular, m)?)?;
    m.add_function(wrap_pyfunction!(singular_candidates, m)?)?;
    m.add_function(wrap_pyfunction!(one_sided_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(convexity_probe, m)?)?;
    m.add_function(wrap_pyfunction!(rigidity_probe, m)?)?;
    Ok(())
}
