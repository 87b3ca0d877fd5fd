//! Python module `ptbloch`.
//!
//! Reports are returned as plain Python objects (dicts, lists, floats) by
//! round-tripping the JSON documents the command-line tool writes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ptbloch::bands::{nonreal_arcs_in_rectangle, real_coverage_check, sweep, uniform_t_grid};
use ptbloch::config::parse_config;
use ptbloch::enclosure::{self, disjointness_certificate, EnclosureReport};
use ptbloch::galerkin::{default_truncation, truncation_error_estimate};
use ptbloch::report::to_json;
use ptbloch::verify::{homotopy_trace, run_verification, uniform_eps_grid, Tolerances};
use ptbloch::{Error, FourierPoly};

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::Numeric { .. } | Error::Io { .. } => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn json_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = to_json(value);
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Odd order `n` with PT-symmetric periodic coefficients `p_2, ..., p_n`.
///
/// `coefficients` maps `v` to `{m: c(m)}`; every `c(m)` must be real.
#[pyclass(name = "ProblemSpec", module = "ptbloch", frozen, skip_from_py_object)]
struct PyProblemSpec {
    inner: ptbloch::ProblemSpec,
}

#[pymethods]
impl PyProblemSpec {
    #[new]
    #[pyo3(signature = (n, coefficients = None, unsafe_precision = false))]
    fn new(n: u32, coefficients: Option<BTreeMap<u32, BTreeMap<i64, f64>>>, unsafe_precision: bool) -> PyResult<Self> {
        let coeffs = coefficients
            .unwrap_or_default()
            .into_iter()
            .map(|(v, terms)| {
                let poly = FourierPoly::from_terms(terms.into_iter().map(|(m, c)| (m, Complex64::new(c, 0.0))));
                (v, poly)
            })
            .collect();
        let inner = ptbloch::ProblemSpec::with_precision(n, coeffs, unsafe_precision).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// `p_2 = amplitude * 2 cos(2 pi x)` with order `n`.
    #[staticmethod]
    #[pyo3(signature = (amplitude, n = 3))]
    fn cosine(amplitude: f64, n: u32) -> PyResult<Self> {
        let coeffs = BTreeMap::from([(2, FourierPoly::cosine(amplitude, 1))]);
        let inner = ptbloch::ProblemSpec::new(n, coeffs).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// The spec of a JSON configuration document.
    #[staticmethod]
    fn from_config(document: &str) -> PyResult<Self> {
        let cfg = parse_config(document).map_err(to_py_err)?;
        Ok(Self { inner: cfg.spec })
    }

    #[getter]
    fn order(&self) -> u32 {
        self.inner.order()
    }

    /// The constant `C` of the localisation estimates.
    #[getter(C)]
    fn c(&self) -> f64 {
        enclosure::compute_c(&self.inner)
    }

    /// The index `N` beyond which the disks are disjoint.
    #[getter(N)]
    fn big_n(&self) -> u64 {
        enclosure::compute_n(enclosure::compute_c(&self.inner))
    }

    #[getter]
    fn default_truncation(&self) -> usize {
        default_truncation(&self.inner)
    }

    /// `{v: {m: c(m)}}`.
    fn coefficients(&self) -> BTreeMap<u32, BTreeMap<i64, f64>> {
        self.inner
            .coeffs()
            .map(|(v, p)| (v, p.terms().map(|(m, c)| (m, c.re)).collect()))
            .collect()
    }

    fn scaled(&self, alpha: f64) -> Self {
        Self {
            inner: self.inner.scaled(alpha),
        }
    }

    fn __repr__(&self) -> String {
        format!("ProblemSpec(n={}, coefficients={:?})", self.inner.order(), self.coefficients())
    }
}

#[pyfunction]
fn reality_threshold(n: u32) -> f64 {
    enclosure::reality_threshold(n)
}

/// `(2 pi k + pi t)^n`.
#[pyfunction]
fn free_eigenvalue(k: i64, t: f64, n: u32) -> f64 {
    enclosure::free_eigenvalue(k, t, n)
}

/// Enclosure regions at `t` together with the disjointness certificate.
#[pyfunction]
#[pyo3(signature = (spec, t, window = None))]
fn enclose(py: Python<'_>, spec: &PyProblemSpec, t: f64, window: Option<u64>) -> PyResult<Py<PyAny>> {
    let report = EnclosureReport::new(&spec.inner, t, window).map_err(to_py_err)?;
    let certificate = disjointness_certificate(&report);
    json_to_py(py, &serde_json::json!({ "report": report, "certificate": certificate }))
}

/// Eigenvalues at `(t, eps)` as `(lambda, k_label, trusted, trunc_err)` tuples.
#[pyfunction]
#[pyo3(signature = (spec, t, k_max = None, eps = 1.0))]
fn eigs(
    py: Python<'_>,
    spec: &PyProblemSpec,
    t: f64,
    k_max: Option<usize>,
    eps: f64,
) -> PyResult<Vec<(Complex64, i64, bool, Option<f64>)>> {
    let k_max = k_max.unwrap_or_else(|| default_truncation(&spec.inner));
    let est = py
        .detach(|| truncation_error_estimate(&spec.inner, t, eps, k_max))
        .map_err(to_py_err)?;
    let sol = &est.solution;
    Ok(sol
        .pairs
        .iter()
        .zip(&est.errors)
        .map(|(p, e)| (p.lambda, p.k_label, sol.is_trusted(p), *e))
        .collect())
}

/// All checks at every `t` in `ts`; the homotopy is included when `eps_steps` is given.
#[pyfunction]
#[pyo3(signature = (spec, ts, k_max = None, eps_steps = None))]
fn verify(
    py: Python<'_>,
    spec: &PyProblemSpec,
    ts: Vec<f64>,
    k_max: Option<usize>,
    eps_steps: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let k_max = k_max.unwrap_or_else(|| default_truncation(&spec.inner));
    let grid = eps_steps.map(uniform_eps_grid);
    let report = py
        .detach(|| run_verification(&spec.inner, &ts, k_max, None, &Tolerances::default(), grid.as_deref()))
        .map_err(to_py_err)?;
    json_to_py(py, &report)
}

/// Band structure over a uniform grid of `t_steps` points with the coverage and rectangle checks.
#[pyfunction]
#[pyo3(signature = (spec, t_steps = 81, k_max = None))]
fn bands(py: Python<'_>, spec: &PyProblemSpec, t_steps: usize, k_max: Option<usize>) -> PyResult<Py<PyAny>> {
    let k_max = k_max.unwrap_or_else(|| default_truncation(&spec.inner));
    let tol = Tolerances::default();
    let (bs, checks) = py
        .detach(|| {
            let bs = sweep(&spec.inner, &uniform_t_grid(t_steps), k_max, &tol)?;
            let report = EnclosureReport::new(&spec.inner, 1.0, None)?;
            let checks = vec![
                real_coverage_check(&bs, &report, &tol),
                nonreal_arcs_in_rectangle(&bs, &report, &tol),
            ];
            Ok::<_, Error>((bs, checks))
        })
        .map_err(to_py_err)?;
    json_to_py(py, &serde_json::json!({ "bands": bs, "checks": checks }))
}

/// Eigenvalue trajectories from `eps = 0` to `eps = 1` at `t`.
#[pyfunction]
#[pyo3(signature = (spec, t, k_max = None, eps_steps = 10))]
fn homotopy(py: Python<'_>, spec: &PyProblemSpec, t: f64, k_max: Option<usize>, eps_steps: usize) -> PyResult<Py<PyAny>> {
    let k_max = k_max.unwrap_or_else(|| default_truncation(&spec.inner));
    let trace = py
        .detach(|| {
            let report = EnclosureReport::new(&spec.inner, t, None)?;
            homotopy_trace(&spec.inner, t, k_max, &uniform_eps_grid(eps_steps), &report, &Tolerances::default())
        })
        .map_err(to_py_err)?;
    json_to_py(py, &trace)
}

#[pymodule]
#[pyo3(name = "ptbloch")]
fn ptbloch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblemSpec>()?;
    m.add_function(wrap_pyfunction!(reality_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(free_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(enclose, m)?)?;
    m.add_function(wrap_pyfunction!(eigs, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(bands, m)?)?;
    m.add_function(wrap_pyfunction!(homotopy, m)?)?;
    Ok(())
}
