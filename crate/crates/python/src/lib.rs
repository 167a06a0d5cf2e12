//! Python bindings: models, derived systems, commutation checks and Jacobi
//! field integration.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyKeyError, PyValueError};
use pyo3::prelude::*;

use jetvar::expr::EquivalenceConfig;
use jetvar::frontend::{self, render_model, render_system, Format, ModelKind};
use jetvar::numeric::{self, JacobiProblem, NumericError};
use jetvar::variational::{CommutationReport, EquationSystem};

create_exception!(jetvar_py, NumericFailure, PyException);

/// `(eps, residual)` rows and the fitted exponent.
type ResidualResult = (Vec<(f64, f64)>, Option<f64>);

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn numeric_error(e: NumericError) -> PyErr {
    match e {
        NumericError::InitialData(_)
        | NumericError::InvalidGrid(_)
        | NumericError::InvalidEpsilon(_) => value_error(e),
        _ => NumericFailure::new_err(e.to_string()),
    }
}

fn format(name: &str) -> PyResult<Format> {
    match name {
        "text" => Ok(Format::Text),
        "latex" => Ok(Format::Latex),
        "json" => Ok(Format::Json),
        other => Err(value_error(format!(
            "unknown format `{other}` (expected text, latex or json)"
        ))),
    }
}

/// A Lagrangian, equation or Hamiltonian model.
#[pyclass(frozen, module = "jetvar_py")]
struct Model {
    inner: frontend::Model,
}

#[pymethods]
impl Model {
    /// Parses model-file text; `order` overrides the inferred chart order.
    #[new]
    #[pyo3(signature = (text, order = None))]
    fn new(text: &str, order: Option<usize>) -> PyResult<Self> {
        let inner = frontend::Model::parse_with_order(text, order).map_err(value_error)?;
        Ok(Model { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, order = None))]
    fn load(path: std::path::PathBuf, order: Option<usize>) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| value_error(format!("{}: {e}", path.display())))?;
        Model::new(&text, order)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            ModelKind::Lagrangian(_) => "lagrangian",
            ModelKind::Equations(_) => "equations",
            ModelKind::Hamiltonian(_) => "hamiltonian",
        }
    }

    #[getter]
    fn base(&self) -> Vec<String> {
        self.inner.spec().base().to_vec()
    }

    #[getter]
    fn fibre(&self) -> Vec<String> {
        self.inner.spec().fibre().to_vec()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.spec().order()
    }

    /// Euler-Lagrange, Hamilton or declared equations, one string each.
    fn equations(&self) -> PyResult<Vec<String>> {
        Ok(strings(&self.inner.equations().map_err(value_error)?))
    }

    /// The equations followed by their vertical derivatives.
    fn deviation(&self) -> PyResult<Vec<String>> {
        Ok(strings(&self.inner.deviation().map_err(value_error)?))
    }

    #[pyo3(signature = (format = "text"))]
    fn derive(&self, format: &str) -> PyResult<String> {
        let fmt = self::format(format)?;
        Ok(render_system(
            &self.inner.equations().map_err(value_error)?,
            fmt,
        ))
    }

    #[pyo3(signature = (format = "text"))]
    fn deviate(&self, format: &str) -> PyResult<String> {
        let fmt = self::format(format)?;
        Ok(render_system(
            &self.inner.deviation().map_err(value_error)?,
            fmt,
        ))
    }

    #[pyo3(signature = (format = "text"))]
    fn render(&self, format: &str) -> PyResult<String> {
        Ok(render_model(&self.inner, self::format(format)?))
    }

    #[pyo3(signature = (seed = None))]
    fn check(&self, seed: Option<u64>) -> PyResult<Report> {
        let config = seed.map_or_else(EquivalenceConfig::default, EquivalenceConfig::with_seed);
        let inner = self.inner.check(&config).map_err(value_error)?;
        Ok(Report { inner })
    }

    /// Integrates the base solution and the Jacobi field along it; missing
    /// `jacobi_init` starts the field at zero.
    #[pyo3(signature = (init, t1, jacobi_init = None, t0 = 0.0, dt = 1e-3))]
    fn simulate(
        &self,
        py: Python<'_>,
        init: BTreeMap<String, f64>,
        t1: f64,
        jacobi_init: Option<BTreeMap<String, f64>>,
        t0: f64,
        dt: f64,
    ) -> PyResult<(Trajectory, Trajectory)> {
        let prob = self.problem(init, jacobi_init, t0, t1, dt)?;
        let (s, psi) = py
            .detach(|| numeric::solve_jacobi(&prob))
            .map_err(numeric_error)?;
        Ok((Trajectory { inner: s }, Trajectory { inner: psi }))
    }

    /// `(rows, exponent)` where rows are `(eps, residual)` pairs.
    #[pyo3(signature = (init, t1, jacobi_init = None, eps = vec![1e-2, 5e-3, 2.5e-3], t0 = 0.0, dt = 1e-3))]
    #[allow(clippy::too_many_arguments)]
    fn residual(
        &self,
        py: Python<'_>,
        init: BTreeMap<String, f64>,
        t1: f64,
        jacobi_init: Option<BTreeMap<String, f64>>,
        eps: Vec<f64>,
        t0: f64,
        dt: f64,
    ) -> PyResult<ResidualResult> {
        let prob = self.problem(init, jacobi_init, t0, t1, dt)?;
        let table = py
            .detach(|| numeric::perturbation_residual(&prob, &eps))
            .map_err(numeric_error)?;
        let rows = table.rows.iter().map(|r| (r.eps, r.residual)).collect();
        Ok((rows, table.exponent))
    }

    fn __repr__(&self) -> String {
        let spec = self.inner.spec();
        format!(
            "Model(kind={:?}, base={:?}, fibre={:?}, order={})",
            self.kind(),
            spec.base(),
            spec.fibre(),
            spec.order()
        )
    }

    fn __str__(&self) -> String {
        render_model(&self.inner, Format::Text)
    }
}

impl Model {
    fn problem(
        &self,
        init: BTreeMap<String, f64>,
        jacobi_init: Option<BTreeMap<String, f64>>,
        t0: f64,
        t1: f64,
        dt: f64,
    ) -> PyResult<JacobiProblem> {
        let system = self.inner.deviation().map_err(value_error)?;
        let jacobi_init = match jacobi_init {
            Some(j) => j,
            None => numeric::deviation_state_names(&system)
                .map_err(numeric_error)?
                .1
                .into_iter()
                .map(|n| (n, 0.0))
                .collect(),
        };
        JacobiProblem::new(system, init, jacobi_init, t0, t1, dt).map_err(numeric_error)
    }
}

fn strings(sys: &EquationSystem) -> Vec<String> {
    sys.equations().iter().map(|e| e.to_string()).collect()
}

/// Pairwise outcome of a commutation check.
#[pyclass(frozen, module = "jetvar_py")]
struct Report {
    inner: CommutationReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    #[getter]
    fn theorem(&self) -> String {
        self.inner.theorem.clone()
    }

    #[getter]
    fn summary(&self) -> String {
        self.inner.summary()
    }

    /// `(label, lhs, rhs, holds, detail)` per compared pair.
    #[getter]
    fn pairs(&self) -> Vec<(String, String, String, bool, String)> {
        self.inner
            .pairs
            .iter()
            .map(|p| {
                (
                    p.label.clone(),
                    p.lhs.to_string(),
                    p.rhs.to_string(),
                    p.outcome.holds(),
                    p.outcome.to_string(),
                )
            })
            .collect()
    }

    fn __bool__(&self) -> bool {
        self.inner.passed()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Sampled states on a time grid.
#[pyclass(frozen, module = "jetvar_py")]
struct Trajectory {
    inner: numeric::Trajectory,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names.clone()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    #[getter]
    fn states(&self) -> Vec<Vec<f64>> {
        self.inner.states.clone()
    }

    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        self.inner
            .column(name)
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Trajectory(names={:?}, len={})",
            self.inner.names,
            self.inner.len()
        )
    }
}

/// Max-norm distance between two trajectories on the same grid, matching
/// columns by name.
#[pyfunction]
fn max_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    numeric::max_distance(&a.inner, &b.inner)
}

#[pymodule]
fn jetvar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Report>()?;
    m.add_class::<Trajectory>()?;
    m.add_function(wrap_pyfunction!(max_distance, m)?)?;
    m.add("NumericFailure", m.py().get_type::<NumericFailure>())?;
    Ok(())
}
