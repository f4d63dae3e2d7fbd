//! Python bindings: `import hyperwit_py`.
//!
//! Structured results (reports, certificates) come back as plain dicts
//! decoded from the same JSON the CLI prints.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use hyperwit::hypergraph::{Bipartition, Family};
use hyperwit::measurement::{product_settings, witness_settings, SettingMode};
use hyperwit::witness::{build_witness, expectation, resolve_alpha, AlphaSource, NoisyState, WitnessKind, WitnessSpec};
use hyperwit::{Rational, Scalar};

fn err(e: hyperwit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn fraction(s: Scalar) -> Option<(i128, i128)> {
    s.as_exact().map(|r| (*r.numer(), *r.denom()))
}

fn parse<T: std::str::FromStr<Err = hyperwit::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

#[pyclass(name = "Hypergraph", module = "hyperwit_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyHypergraph(hyperwit::Hypergraph);

#[pymethods]
impl PyHypergraph {
    #[new]
    fn new(n: usize, edges: Vec<Vec<usize>>) -> PyResult<Self> {
        hyperwit::Hypergraph::canonicalize(edges, n).map(Self).map_err(err)
    }

    /// One of "single-max", "all-n-1", "all-ge-n-1".
    #[staticmethod]
    fn family(name: &str, n: usize) -> PyResult<Self> {
        hyperwit::Hypergraph::family(parse::<Family>(name)?, n).map(Self).map_err(err)
    }

    /// Text form "n=3; edges=[[1,2,3]]".
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse(text).map(Self)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn edges(&self) -> Vec<Vec<usize>> {
        self.0.edge_list()
    }

    #[getter]
    fn k_max(&self) -> usize {
        self.0.k_max()
    }

    fn is_connected(&self) -> bool {
        self.0.is_connected()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Hypergraph('{}')", self.0)
    }
}

#[pyclass(name = "SignState", module = "hyperwit_py", frozen)]
struct PySignState(hyperwit::SignState);

#[pymethods]
impl PySignState {
    #[staticmethod]
    fn from_hex(n: usize, hex: &str) -> PyResult<Self> {
        hyperwit::SignState::from_hex(n, hex).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// +1/-1 per computational basis label.
    fn signs(&self) -> Vec<i8> {
        (0..self.0.dim()).map(|x| self.0.sign(x)).collect()
    }

    fn amplitudes(&self) -> Vec<f64> {
        self.0.amplitudes()
    }

    fn to_hex(&self) -> String {
        self.0.to_hex()
    }

    /// Recovered hypergraph and global sign.
    fn hypergraph(&self) -> PyResult<(PyHypergraph, i8)> {
        let (h, s) = hyperwit::extract_hypergraph(&self.0).map_err(err)?;
        Ok((PyHypergraph(h), s))
    }
}

#[pyfunction]
fn build_state(h: &PyHypergraph) -> PyResult<PySignState> {
    hyperwit::build_state(&h.0).map(PySignState).map_err(err)
}

/// Full bipartition sweep as a dict with `alpha`, `E`, `argmax_bipartition`.
#[pyfunction]
#[pyo3(signature = (h, cap = 12))]
fn entanglement<'py>(py: Python<'py>, h: &PyHypergraph, cap: usize) -> PyResult<Bound<'py, PyAny>> {
    let state = hyperwit::build_state(&h.0).map_err(err)?;
    let report = py.detach(|| hyperwit::alpha_multipartite(&state, cap)).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
fn closed_form_alpha(family: &str, n: usize) -> PyResult<f64> {
    hyperwit::closed_form_alpha(parse(family)?, n).map(|s| s.to_f64()).map_err(err)
}

#[pyfunction]
fn closed_form_e(family: &str, n: usize) -> PyResult<f64> {
    hyperwit::closed_form_e(parse(family)?, n).map(|s| s.to_f64()).map_err(err)
}

/// Reduction certificate for the bipartition with part A = `part_a`.
#[pyfunction]
fn reduce<'py>(py: Python<'py>, h: &PyHypergraph, part_a: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    let bp = Bipartition::new(h.0.n(), &part_a).map_err(err)?;
    let cert = py.detach(|| hyperwit::reduce(&h.0, &bp)).map_err(err)?;
    to_py(py, &cert)
}

#[pyclass(name = "Witness", module = "hyperwit_py", frozen)]
struct PyWitness(WitnessSpec);

#[pymethods]
impl PyWitness {
    #[new]
    #[pyo3(signature = (h, kind = "projector", alpha_source = "auto"))]
    fn new(h: &PyHypergraph, kind: &str, alpha_source: &str) -> PyResult<Self> {
        let alpha = resolve_alpha(&h.0, parse::<AlphaSource>(alpha_source)?).map_err(err)?;
        build_witness(parse::<WitnessKind>(kind)?, &h.0, alpha).map(Self).map_err(err)
    }

    #[getter]
    fn kind(&self) -> String {
        self.0.kind.to_string()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha.to_f64()
    }

    #[getter]
    fn beta(&self) -> Option<f64> {
        self.0.beta.map(|b| b.to_f64())
    }

    #[getter]
    fn robustness(&self) -> f64 {
        self.0.robustness.to_f64()
    }

    /// `(num, den)` when the robustness is rational.
    #[getter]
    fn robustness_fraction(&self) -> Option<(i128, i128)> {
        fraction(self.0.robustness)
    }

    /// Expectation on `(1-p)|H><H| + p I/2^n`, with `p = num/den`.
    #[pyo3(signature = (num, den = 1))]
    fn expectation(&self, num: i128, den: i128) -> PyResult<f64> {
        if den == 0 {
            return Err(PyValueError::new_err("zero denominator"));
        }
        let p = Scalar::Exact(Rational::new(num, den));
        let state = NoisyState::new(self.0.hypergraph.clone(), p).map_err(err)?;
        expectation(&self.0, &state).map(|e| e.to_f64()).map_err(err)
    }

    /// Local settings, "canonical" or "greedy".
    #[pyo3(signature = (mode = "canonical"))]
    fn settings(&self, mode: &str) -> PyResult<Vec<String>> {
        let report = witness_settings(&self.0, parse::<SettingMode>(mode)?).map_err(err)?;
        Ok(report.settings.iter().map(|s| s.word()).collect())
    }
}

/// Settings for the stabilizer product over `subset`.
#[pyfunction]
#[pyo3(signature = (h, subset, mode = "canonical"))]
fn stabilizer_product_settings(h: &PyHypergraph, subset: Vec<usize>, mode: &str) -> PyResult<Vec<String>> {
    let report = product_settings(&h.0, &subset, parse::<SettingMode>(mode)?).map_err(err)?;
    Ok(report.settings.iter().map(|s| s.word()).collect())
}

#[pymodule]
fn hyperwit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PySignState>()?;
    m.add_class::<PyWitness>()?;
    m.add_function(wrap_pyfunction!(build_state, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_e, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(stabilizer_product_settings, m)?)?;
    Ok(())
}
