//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use trotterlab::bounds::{self, Family, GateCountQuery, Regime};
use trotterlab::dense::{check_cap, schatten_norm, trotter_error_op};
use trotterlab::fermion::{FermionHamiltonian, FermionJson};
use trotterlab::lab;
use trotterlab::models::{self, ModelSpec};
use trotterlab::norms::{fermion_profile, NormProfile};
use trotterlab::pauli::PauliHamiltonian;
use trotterlab::suzuki;

const DEFAULT_CAP: usize = 12;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(v).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let s: String = match obj.extract::<String>() {
        Ok(s) => s,
        Err(_) => obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?,
    };
    serde_json::from_str(&s).map_err(err)
}

/// Qubit Hamiltonian `Σ_γ b_γ P_γ`.
#[pyclass(name = "Hamiltonian", frozen)]
struct PyHamiltonian {
    inner: PauliHamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    /// Parse from a JSON string or an already-decoded dict.
    #[staticmethod]
    fn from_json(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        let j = from_py(obj)?;
        Ok(Self { inner: PauliHamiltonian::from_json(&j).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_json()).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn gamma(&self) -> usize {
        self.inner.gamma()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.terms().iter().map(|t| t.string.label()).collect()
    }

    fn scaled(&self, a: f64) -> Self {
        Self { inner: self.inner.scaled(a) }
    }

    fn norms(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &NormProfile::of(&self.inner).map_err(err)?)
    }

    /// Exact `‖e^{-iHt} − S(t/r)^r‖_p`, normalized by default.
    #[pyo3(signature = (t, r, order, p, normalized = true, cap = DEFAULT_CAP))]
    fn trotter_error(&self, t: f64, r: u64, order: u32, p: f64, normalized: bool, cap: usize) -> PyResult<f64> {
        let e = trotter_error_op(&self.inner, t, r, order, cap).map_err(err)?;
        schatten_norm(&e, p, normalized).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.gamma()
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(n={}, gamma={}, k={})", self.inner.n(), self.inner.gamma(), self.inner.k())
    }
}

/// Fermionic Hamiltonian, carried only for its norm profile.
#[pyclass(name = "FermionHamiltonian", frozen)]
struct PyFermion {
    inner: FermionHamiltonian,
}

#[pymethods]
impl PyFermion {
    #[staticmethod]
    fn from_json(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        let j: FermionJson = from_py(obj)?;
        Ok(Self { inner: FermionHamiltonian::from_json(&j).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_json()).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    fn norms(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &fermion_profile(&self.inner).map_err(err)?)
    }

    fn jordan_wigner(&self) -> PyResult<PyHamiltonian> {
        let jw = trotterlab::fermion::jordan_wigner(&self.inner).map_err(err)?;
        Ok(PyHamiltonian { inner: jw.hamiltonian })
    }
}

/// Build a model from a spec such as `{"family": "chain-heisenberg", "n": 4, "j": 1.0}`.
#[pyfunction]
fn model(spec: &Bound<'_, PyAny>) -> PyResult<PyHamiltonian> {
    let spec: ModelSpec = from_py(spec)?;
    Ok(PyHamiltonian { inner: models::build(&spec).map_err(err)? })
}

#[pyfunction]
fn fermi_hop(m: usize) -> PyResult<PyFermion> {
    let f = models::fermi_hop(m).map_err(err)?;
    Ok(PyFermion { inner: f.combined().map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (gamma, order, t, merged = true))]
fn schedule(py: Python<'_>, gamma: usize, order: u32, t: f64, merged: bool) -> PyResult<Py<PyAny>> {
    let s = if merged {
        suzuki::build_schedule(gamma, order, t)
    } else {
        suzuki::build_schedule_unmerged(gamma, order, t)
    };
    to_py(py, &s.map_err(err)?)
}

#[pyfunction]
fn upsilon(order: u32) -> PyResult<u64> {
    suzuki::upsilon(order).map_err(err)
}

/// Step and gate counts for one regime. Fermionic inputs use `λ_ferm` in the nonrandom regime.
#[pyfunction]
#[pyo3(signature = (h, regime, t, eps, delta = 0.01, order = 2))]
fn gatecount(py: Python<'_>, h: &Bound<'_, PyAny>, regime: &str, t: f64, eps: f64, delta: f64, order: u32) -> PyResult<Py<PyAny>> {
    let regime: Regime = regime.parse().map_err(err)?;
    let q = GateCountQuery::new(t, eps, delta, order, regime).map_err(err)?;
    let res = if let Ok(h) = h.cast::<PyHamiltonian>() {
        let h = &h.get().inner;
        bounds::gatecount(&NormProfile::of(h).map_err(err)?, h.n(), &q)
    } else {
        let f = &h.cast::<PyFermion>()?.get().inner;
        let mut p = fermion_profile(f).map_err(err)?;
        match (regime, p.lambda_ferm) {
            (Regime::NonrandomTypical, Some(lf)) => {
                p.lambda = lf;
                bounds::gatecount_nonrandom(&p, &q)
            }
            _ => bounds::gatecount(&p, f.n, &q),
        }
    };
    to_py(py, &res.map_err(err)?)
}

#[pyfunction]
fn markov_tail(norm: f64, eps: f64, p: f64) -> PyResult<f64> {
    bounds::markov_tail(norm, eps, p).map_err(err)
}

/// Cells for one row family, e.g. `{"family": "power-law", "d": 1, "alpha": 0.75}`.
#[pyfunction]
fn table1(py: Python<'_>, family: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let family: Family = from_py(family)?;
    to_py(py, &bounds::table1_cells(family).map_err(err)?)
}

#[pyfunction]
fn truncation_plan(py: Python<'_>, n: usize, d: usize, alpha: f64, t: f64, eps: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::truncation_plan(n, d, alpha, t, eps).map_err(err)?)
}

#[pyfunction]
fn counting_net_size(py: Python<'_>, k: usize, n: usize, j: f64, eps: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::counting_net_size(k, n, j, eps).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (m, order, cap = DEFAULT_CAP))]
fn optimality(py: Python<'_>, m: usize, order: u32, cap: usize) -> PyResult<Py<PyAny>> {
    to_py(py, &lab::optimality_experiment(m, order, cap).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (m, cap = DEFAULT_CAP))]
fn fermi_optimality(py: Python<'_>, m: usize, cap: usize) -> PyResult<Py<PyAny>> {
    to_py(py, &lab::fermi_optimality_experiment(m, cap).map_err(err)?)
}

#[pyfunction]
fn memory_ok(n: usize, cap: usize) -> bool {
    check_cap(n, cap).is_ok()
}

#[pymodule]
pub fn trotterlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyFermion>()?;
    m.add_function(wrap_pyfunction!(model, m)?)?;
    m.add_function(wrap_pyfunction!(fermi_hop, m)?)?;
    m.add_function(wrap_pyfunction!(schedule, m)?)?;
    m.add_function(wrap_pyfunction!(upsilon, m)?)?;
    m.add_function(wrap_pyfunction!(gatecount, m)?)?;
    m.add_function(wrap_pyfunction!(markov_tail, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_plan, m)?)?;
    m.add_function(wrap_pyfunction!(counting_net_size, m)?)?;
    m.add_function(wrap_pyfunction!(optimality, m)?)?;
    m.add_function(wrap_pyfunction!(fermi_optimality, m)?)?;
    m.add_function(wrap_pyfunction!(memory_ok, m)?)?;
    Ok(())
}
