//! Python bindings: scenario bundles, the sine integral, quadrature and the
//! angle metric on sup-norm coordinate spaces.

use std::cell::RefCell;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use semiflow::diagnostics::m_functional;
use semiflow::registry::{self, RunParams};
use semiflow::semigroup::scenarios::{r2, remark2_jordan};
use semiflow::semigroup::{jordan_block_q, MatrixFlow};
use semiflow::space::{self, AmbientSpace, Subspace, Vector};
use semiflow::{specialfn, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidSpace(_)
        | Error::MalformedVector(_)
        | Error::SpaceMismatch
        | Error::DegenerateBasis(_)
        | Error::UnsupportedDimension { .. }
        | Error::Domain(_)
        | Error::UnsupportedScenario(_) => PyValueError::new_err(e.to_string()),
        Error::SolverFailure { .. } | Error::QuadratureFailure(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
    }
}

/// Spans `rows` inside sup-norm ℝⁿ, where n is the common row length.
fn sup_subspace(rows: &[Vec<f64>]) -> Result<Subspace, Error> {
    let n = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidArgument("a subspace needs a basis vector".into()))?;
    let space = AmbientSpace::sup_coords(n)?;
    let basis = rows
        .iter()
        .map(|r| Vector::from_samples(space.clone(), r.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Subspace::new(basis)
}

/// `(name, anchor)` for every registered scenario.
#[pyfunction]
fn scenarios() -> Vec<(&'static str, &'static str)> {
    registry::SCENARIOS
        .iter()
        .map(|e| (e.name, e.anchor))
        .collect()
}

/// Runs a scenario bundle and returns it as a dict; unset parameters take
/// the scenario defaults.
#[pyfunction]
#[pyo3(signature = (name, *, t_max=None, t_step=None, s_max=None, s_step=None,
    grid_step=None, domain_max=None, k_max=None, sphere_samples=None))]
#[allow(clippy::too_many_arguments)]
fn run_bundle<'py>(
    py: Python<'py>,
    name: &str,
    t_max: Option<f64>,
    t_step: Option<f64>,
    s_max: Option<f64>,
    s_step: Option<f64>,
    grid_step: Option<f64>,
    domain_max: Option<f64>,
    k_max: Option<usize>,
    sphere_samples: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let params = RunParams {
        t_max,
        t_step,
        s_max,
        s_step,
        grid_step,
        domain_max,
        k_max,
        sphere_samples,
    };
    let bundle = py
        .detach(|| registry::run_bundle(name, &params))
        .map_err(to_py)?;
    let passed = bundle.passed();
    let mut value =
        serde_json::to_value(&bundle).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    value["passed"] = serde_json::Value::Bool(passed);
    let text = value.to_string();
    py.import("json")?.call_method1("loads", (text,))
}

#[pyfunction]
fn si(x: f64) -> f64 {
    specialfn::si(x)
}

#[pyfunction]
fn sinc(x: f64) -> f64 {
    specialfn::sinc(x)
}

#[pyfunction]
fn si_series(x: f64) -> f64 {
    specialfn::si_series(x)
}

#[pyfunction]
fn si_asymptotic(x: f64) -> f64 {
    specialfn::si_asymptotic(x)
}

/// `(value, error_estimate, evaluations)` of the integral of `f` over `[a, b]`.
#[pyfunction]
#[pyo3(signature = (f, a, b, tol=1e-10))]
fn adaptive_simpson(f: &Bound<'_, PyAny>, a: f64, b: f64, tol: f64) -> PyResult<(f64, f64, usize)> {
    // the first Python exception aborts the integrand; later calls return NaN
    let raised: RefCell<Option<PyErr>> = RefCell::new(None);
    let g = |x: f64| -> f64 {
        if raised.borrow().is_some() {
            return f64::NAN;
        }
        match f.call1((x,)).and_then(|y| y.extract::<f64>()) {
            Ok(y) => y,
            Err(e) => {
                *raised.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    };
    let r = specialfn::adaptive_simpson(g, a, b, tol);
    if let Some(e) = raised.into_inner() {
        return Err(e);
    }
    let r = r.map_err(to_py)?;
    Ok((r.value, r.error_estimate, r.evaluations))
}

/// `φ_t(y, z) = (y + tz, z)`.
#[pyfunction]
fn jordan(y: f64, z: f64, t: f64) -> (f64, f64) {
    jordan_block_q(y, z, t)
}

/// `m(y, z) = inf_{t ≤ t_max} ‖φ_t(y, z)‖` for the Jordan flow.
#[pyfunction]
#[pyo3(signature = (y, z, t_max=50.0))]
fn jordan_m(py: Python<'_>, y: f64, z: f64, t_max: f64) -> PyResult<f64> {
    py.detach(|| {
        let sem = remark2_jordan()?;
        m_functional(&sem, &r2(y, z)?, t_max)
    })
    .map_err(to_py)
}

/// `exp(tA)` as nested lists.
#[pyfunction]
fn matrix_exp(rows: Vec<Vec<f64>>, t: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(MatrixFlow::new(&rows).map_err(to_py)?.exp_rows(t))
}

/// Sup-norm distance from `v` to the span of `basis` in ℝⁿ.
#[pyfunction]
fn distance_to_span(v: Vec<f64>, basis: Vec<Vec<f64>>) -> PyResult<f64> {
    let s = sup_subspace(&basis).map_err(to_py)?;
    let v = Vector::from_samples(s.space().clone(), v).map_err(to_py)?;
    Ok(space::distance_to_subspace(&v, &s).map_err(to_py)?.0)
}

/// Angle between two spans in sup-norm ℝⁿ, using `m` unit-sphere samples
/// for two-dimensional spans.
#[pyfunction]
#[pyo3(signature = (a, b, m=720))]
fn angle(py: Python<'_>, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, m: usize) -> PyResult<f64> {
    py.detach(|| space::angle(&sup_subspace(&a)?, &sup_subspace(&b)?, m))
        .map_err(to_py)
}

#[pymodule]
fn semiflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_bundle, m)?)?;
    m.add_function(wrap_pyfunction!(si, m)?)?;
    m.add_function(wrap_pyfunction!(sinc, m)?)?;
    m.add_function(wrap_pyfunction!(si_series, m)?)?;
    m.add_function(wrap_pyfunction!(si_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(adaptive_simpson, m)?)?;
    m.add_function(wrap_pyfunction!(jordan, m)?)?;
    m.add_function(wrap_pyfunction!(jordan_m, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_exp, m)?)?;
    m.add_function(wrap_pyfunction!(distance_to_span, m)?)?;
    m.add_function(wrap_pyfunction!(angle, m)?)?;
    Ok(())
}
