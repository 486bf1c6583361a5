//! Python bindings for `spin_core`.
//!
//! Matrices cross the boundary as lists of rows of Python `complex`.
//! Structured reports come back as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use spin_core::checks::{self, SuiteConfig};
use spin_core::spectrahedra::{self, SelfadjointTuple, ANDO_MAX_ITER, RADIUS_GRID};
use spin_core::{dilation, order_iso, spin_construct, spin_pairs, spin_verify};
use spin_core::{CMatrix, SpinError as CoreError, C64};

create_exception!(spinsys, SpinError, PyException);

type Rows = Vec<Vec<C64>>;

const DEFAULT_TOL: f64 = 1e-9;

fn to_py(err: CoreError) -> PyErr {
    match err {
        CoreError::InvalidData(_)
        | CoreError::ShapeMismatch(_)
        | CoreError::ArityMismatch { .. }
        | CoreError::BadArity(_) => PyValueError::new_err(err.to_string()),
        other => SpinError::new_err(other.to_string()),
    }
}

fn matrix(rows: Rows) -> PyResult<CMatrix> {
    let c = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || c == 0 || rows.iter().any(|r| r.len() != c) {
        return Err(PyValueError::new_err(
            "expected a non-empty rectangular list of rows",
        ));
    }
    Ok(CMatrix::from_rows(&rows))
}

fn matrices(list: Vec<Rows>) -> PyResult<Vec<CMatrix>> {
    list.into_iter().map(matrix).collect()
}

fn rows(m: &CMatrix) -> Rows {
    (0..m.rows())
        .map(|i| m.data()[i * m.cols()..(i + 1) * m.cols()].to_vec())
        .collect()
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| SpinError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A validated spin tuple of unitaries.
#[pyclass(name = "SpinTuple", module = "spinsys", frozen)]
struct PySpinTuple(spin_construct::SpinTuple);

#[pymethods]
impl PySpinTuple {
    #[new]
    fn new(unitaries: Vec<Rows>) -> PyResult<Self> {
        spin_construct::SpinTuple::new(matrices(unitaries)?)
            .map(Self)
            .map_err(to_py)
    }

    /// Irreducible spin `m`-tuple in dimension `2^(m // 2)`.
    #[staticmethod]
    fn canonical(m: usize) -> PyResult<Self> {
        spin_construct::canonical_spin(m).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn pauli() -> Self {
        Self(spin_construct::pauli())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn unitaries(&self) -> Vec<Rows> {
        self.0.unitaries().iter().map(rows).collect()
    }

    fn inflate(&self, r: usize) -> PyResult<Self> {
        spin_construct::inflate(&self.0, r).map(Self).map_err(to_py)
    }

    /// `(q* uⱼ q)` for a unitary `q`.
    fn conjugate(&self, q: Rows) -> PyResult<Self> {
        spin_construct::conjugate(&self.0, &matrix(q)?)
            .map(Self)
            .map_err(to_py)
    }

    fn conjugate_haar(&self, seed: u64) -> PyResult<Self> {
        let q = spin_core::matcore::haar_unitary(self.0.dim(), seed);
        spin_construct::conjugate(&self.0, &q)
            .map(Self)
            .map_err(to_py)
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn verify<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let report = spin_verify::verify_spin(&self.0, tol);
        let out = to_dict(py, &report)?;
        out.set_item("passes", report.passes(tol))?;
        Ok(out)
    }

    fn is_irreducible(&self) -> bool {
        spin_verify::is_irreducible(&self.0)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| SpinError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(Self)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.0.arity()
    }

    fn __repr__(&self) -> String {
        format!("SpinTuple(arity={}, dim={})", self.0.arity(), self.0.dim())
    }
}

/// Unitary `q` with `q* uⱼ q = vⱼ`, or `None` when the tuples are not conjugate.
#[pyfunction]
fn intertwiner(u: &PySpinTuple, v: &PySpinTuple) -> PyResult<Option<Rows>> {
    Ok(spin_verify::intertwiner(&u.0, &v.0)
        .map_err(to_py)?
        .as_ref()
        .map(rows))
}

#[pyfunction]
fn canonicalize_pair<'py>(py: Python<'py>, u: Rows, v: Rows) -> PyResult<Bound<'py, PyAny>> {
    let (u, v) = (matrix(u)?, matrix(v)?);
    let out = to_dict(py, &spin_pairs::canonicalize_pair(&u, &v).map_err(to_py)?)?;
    out.set_item(
        "analysis",
        to_dict(py, &spin_pairs::analyze_x(&u, &v).map_err(to_py)?)?,
    )?;
    Ok(out)
}

#[pyfunction]
fn pair_from_witness(n: usize, w: Rows, y: Rows) -> PyResult<PySpinTuple> {
    spin_construct::pair_from_witness(n, &matrix(w)?, &matrix(y)?)
        .map(PySpinTuple)
        .map_err(to_py)
}

#[pyfunction]
fn complete_to_triple(pair: &PySpinTuple) -> PyResult<PySpinTuple> {
    order_iso::complete_to_pauli_triple(&pair.0)
        .map(PySpinTuple)
        .map_err(to_py)
}

/// Positivity of `b₀⊗1 + Σ bⱼ⊗uⱼ`.
#[pyfunction]
#[pyo3(signature = (coeffs, spin, tol = DEFAULT_TOL))]
fn pencil_psd<'py>(
    py: Python<'py>,
    coeffs: Vec<Rows>,
    spin: &PySpinTuple,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = order_iso::HermitianPencil::new(matrices(coeffs)?).map_err(to_py)?;
    to_dict(py, &order_iso::pencil_psd(&p, &spin.0, tol).map_err(to_py)?)
}

/// Choi data of the map sending the Pauli triple to a spin triple.
#[pyfunction]
fn choi<'py>(py: Python<'py>, triple: &PySpinTuple) -> PyResult<Bound<'py, PyAny>> {
    to_dict(
        py,
        &order_iso::choi_of_triple_map(&triple.0).map_err(to_py)?,
    )
}

#[pyfunction]
#[pyo3(signature = (triple, reverse = false))]
fn dilate<'py>(
    py: Python<'py>,
    triple: &PySpinTuple,
    reverse: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let d = if reverse {
        dilation::reverse_dilate(&triple.0)
    } else {
        dilation::dilate_triple(&triple.0)
    };
    to_dict(py, &d.map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (m, h, tol = DEFAULT_TOL))]
fn in_spin_ball(m: usize, h: Vec<Rows>, tol: f64) -> PyResult<bool> {
    let h = SelfadjointTuple::new(matrices(h)?).map_err(to_py)?;
    spectrahedra::in_spin_ball(m, &h, tol).map_err(to_py)
}

/// Whether `1 − Σ hⱼ⊗aⱼ ⪰ 0`.
#[pyfunction]
#[pyo3(signature = (a, h, tol = DEFAULT_TOL))]
fn in_spectrahedron(a: Vec<Rows>, h: Vec<Rows>, tol: f64) -> PyResult<bool> {
    let a = SelfadjointTuple::new(matrices(a)?).map_err(to_py)?;
    let h = SelfadjointTuple::new(matrices(h)?).map_err(to_py)?;
    spectrahedra::in_spectrahedron(&a, &h, tol).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (y, grid = RADIUS_GRID))]
fn numerical_radius(y: Rows, grid: usize) -> PyResult<f64> {
    let y = matrix(y)?;
    if y.rows() != y.cols() {
        return Err(PyValueError::new_err(
            "numerical radius needs a square matrix",
        ));
    }
    Ok(spectrahedra::numerical_radius(&y, grid))
}

/// Ando certificate for the pair `(a1, a2)`; `status` is `feasible` or `infeasible`.
#[pyfunction]
#[pyo3(signature = (a1, a2, max_iter = ANDO_MAX_ITER))]
fn ando<'py>(py: Python<'py>, a1: Rows, a2: Rows, max_iter: usize) -> PyResult<Bound<'py, PyAny>> {
    let outcome =
        spectrahedra::ando_certificate(&matrix(a1)?, &matrix(a2)?, max_iter).map_err(to_py)?;
    to_dict(py, &outcome)
}

#[pyfunction]
fn check_names() -> Vec<&'static str> {
    checks::check_names()
}

/// Runs one acceptance check by name or numeric prefix.
#[pyfunction]
#[pyo3(signature = (name, seed = 2024, quick = true))]
fn run_check<'py>(
    py: Python<'py>,
    name: &str,
    seed: u64,
    quick: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SuiteConfig {
        seed,
        quick,
        ..SuiteConfig::default()
    };
    let result = py
        .detach(|| checks::run_check(name, &cfg))
        .ok_or_else(|| PyValueError::new_err(format!("unknown check {name:?}")))?;
    to_dict(py, &result)
}

#[pymodule]
fn spinsys(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SpinError", m.py().get_type::<SpinError>())?;
    m.add_class::<PySpinTuple>()?;
    m.add_function(wrap_pyfunction!(intertwiner, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize_pair, m)?)?;
    m.add_function(wrap_pyfunction!(pair_from_witness, m)?)?;
    m.add_function(wrap_pyfunction!(complete_to_triple, m)?)?;
    m.add_function(wrap_pyfunction!(pencil_psd, m)?)?;
    m.add_function(wrap_pyfunction!(choi, m)?)?;
    m.add_function(wrap_pyfunction!(dilate, m)?)?;
    m.add_function(wrap_pyfunction!(in_spin_ball, m)?)?;
    m.add_function(wrap_pyfunction!(in_spectrahedron, m)?)?;
    m.add_function(wrap_pyfunction!(numerical_radius, m)?)?;
    m.add_function(wrap_pyfunction!(ando, m)?)?;
    m.add_function(wrap_pyfunction!(check_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    Ok(())
}
