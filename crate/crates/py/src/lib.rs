use approachability as core;
use approachability::blocks::Strategy;
use approachability::harness;
use approachability::responses::ResponseFunction;
use approachability::targets::closed_form;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(approachability_py, ApproachabilityError, PyValueError);

fn err(e: core::Error) -> PyErr {
    ApproachabilityError::new_err(e.to_string())
}

/// A `d × A` matrix of vector payoffs, one column per action.
#[pyclass(name = "PayoffMatrix", from_py_object)]
#[derive(Clone)]
struct PyPayoffMatrix(core::PayoffMatrix);

#[pymethods]
impl PyPayoffMatrix {
    /// Builds the matrix from its columns `[[m_1], …, [m_A]]`.
    #[new]
    fn new(columns: Vec<Vec<f64>>) -> PyResult<Self> {
        core::PayoffMatrix::from_columns(&columns).map(Self).map_err(err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn actions(&self) -> usize {
        self.0.actions()
    }

    fn columns(&self) -> Vec<Vec<f64>> {
        self.0.columns().map(<[f64]>::to_vec).collect()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn __repr__(&self) -> String {
        format!("PayoffMatrix({:?})", self.columns())
    }
}

/// A probability vector over actions.
#[pyclass(name = "MixedAction", from_py_object)]
#[derive(Clone)]
struct PyMixedAction(core::MixedAction);

#[pymethods]
impl PyMixedAction {
    #[new]
    fn new(weights: Vec<f64>) -> PyResult<Self> {
        core::MixedAction::new(weights).map(Self).map_err(err)
    }

    #[staticmethod]
    fn uniform(actions: usize) -> Self {
        Self(core::MixedAction::uniform(actions))
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("MixedAction({:?})", self.0.weights())
    }
}

fn parse_norm(norm: &str) -> PyResult<core::Norm> {
    norm.parse().map_err(|e: core::Error| err(e))
}

/// A closed convex target set with its distance under an ℓp norm.
#[pyclass(name = "TargetSet", from_py_object)]
#[derive(Clone)]
struct PyTargetSet(core::TargetSet);

#[pymethods]
impl PyTargetSet {
    #[staticmethod]
    #[pyo3(signature = (dim, norm = "inf"))]
    fn negative_orthant(dim: usize, norm: &str) -> PyResult<Self> {
        core::TargetSet::negative_orthant(dim, parse_norm(norm)?).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (point, norm = "2"))]
    fn singleton(point: Vec<f64>, norm: &str) -> PyResult<Self> {
        core::TargetSet::singleton(point, parse_norm(norm)?).map(Self).map_err(err)
    }

    #[staticmethod]
    fn half_line_below(threshold: f64) -> PyResult<Self> {
        core::TargetSet::half_line_below(threshold).map(Self).map_err(err)
    }

    #[staticmethod]
    fn half_line_above(threshold: f64) -> PyResult<Self> {
        core::TargetSet::half_line_above(threshold).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (vertices, norm = "2"))]
    fn polytope(vertices: Vec<Vec<f64>>, norm: &str) -> PyResult<Self> {
        core::TargetSet::polytope(vertices, parse_norm(norm)?).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn distance(&self, r: Vec<f64>) -> PyResult<f64> {
        self.0.distance(&r).map_err(err)
    }

    /// Distance to the expansion `C_α`.
    fn distance_to_expansion(&self, r: Vec<f64>, alpha: f64) -> PyResult<f64> {
        self.0.distance_to_expansion(&r, alpha).map_err(err)
    }
}

/// Vector payoff `x ⊙ m = Σ_a x_a m_a`.
#[pyfunction]
fn combine(x: &PyMixedAction, m: &PyPayoffMatrix) -> PyResult<Vec<f64>> {
    core::combine(&x.0, &m.0).map_err(err)
}

/// Euclidean projection onto the probability simplex.
#[pyfunction]
fn project_to_simplex(v: Vec<f64>) -> PyResult<PyMixedAction> {
    core::project_to_simplex(&v).map(PyMixedAction).map_err(err)
}

/// `x⋆(m)`, a mixed action minimizing `d(x ⊙ m, C)`.
#[pyfunction]
fn best_response(m: &PyPayoffMatrix, target: &PyTargetSet) -> PyResult<PyMixedAction> {
    core::responses::best_response(&m.0, &target.0).map(PyMixedAction).map_err(err)
}

/// `φ⋆(m) = min_x d(x ⊙ m, C)`.
#[pyfunction]
fn phi_star(m: &PyPayoffMatrix, target: &PyTargetSet) -> PyResult<f64> {
    core::targets::phi_star(&m.0, &target.0).map_err(err)
}

/// `m(ν)` of the first example.
#[pyfunction]
fn example1_matrix(nu: f64) -> PyPayoffMatrix {
    PyPayoffMatrix(core::responses::example1_matrix(nu))
}

/// Closed forms of the worked examples, by name.
#[pyfunction]
#[pyo3(signature = (name, *args))]
fn closed_form_value(name: &str, args: Vec<f64>) -> PyResult<f64> {
    let need = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("`{name}` takes {n} arguments")))
        }
    };
    match name {
        "example1_phi_star" => need(1).map(|_| closed_form::example1_phi_star(args[0])),
        "example1_cav" => need(1).map(|_| closed_form::example1_cav(args[0])),
        "example1_phi_xstar" => need(1).map(|_| closed_form::example1_phi_xstar(args[0])),
        "example1_alpha" => need(2).map(|_| closed_form::example1_alpha(args[0], args[1])),
        "example2_phi_star" => need(2).map(|_| closed_form::example2_phi_star(args[0], args[1])),
        "example2_cav" => need(2).map(|_| closed_form::example2_cav(args[0], args[1])),
        "example2_phi_xstar" => need(2).map(|_| closed_form::example2_phi_xstar(args[0], args[1])),
        "example2_alpha_half" => need(2).map(|_| closed_form::example2_alpha_half(args[0], args[1])),
        _ => Err(PyValueError::new_err(format!("unknown closed form `{name}`"))),
    }
}

fn response_by_name(name: &str, target: Option<&PyTargetSet>) -> PyResult<ResponseFunction> {
    match (name, target) {
        ("example1", _) => Ok(ResponseFunction::Example1XStar),
        ("example2", _) => Ok(ResponseFunction::Example2XStar),
        ("xstar", Some(t)) => Ok(ResponseFunction::XStar { target: t.0.clone() }),
        ("xstar", None) => Err(PyValueError::new_err("response `xstar` needs a target set")),
        _ => Err(PyValueError::new_err(format!("unknown response `{name}`"))),
    }
}

/// The block strategy: blocks of lengths 1, 2, 3, … each driven by a regret minimizer.
#[pyclass(name = "BlockStrategy")]
struct PyBlockStrategy(core::blocks::BlockStrategy);

#[pymethods]
impl PyBlockStrategy {
    /// `response` is `"xstar"` (needs `target`), `"example1"` or `"example2"`.
    #[new]
    #[pyo3(signature = (d, actions, response = "xstar", target = None))]
    fn new(d: usize, actions: usize, response: &str, target: Option<PyTargetSet>) -> PyResult<Self> {
        let psi = response_by_name(response, target.as_ref())?;
        Ok(Self(core::blocks::BlockStrategy::new(d, actions, psi)))
    }

    fn act(&mut self) -> PyMixedAction {
        PyMixedAction(self.0.act())
    }

    fn observe(&mut self, m: &PyPayoffMatrix) -> PyResult<()> {
        self.0.observe(&m.0).map_err(err)
    }

    #[getter]
    fn rounds(&self) -> usize {
        self.0.rounds()
    }

    #[getter]
    fn block(&self) -> usize {
        self.0.block()
    }

    #[getter]
    fn delta(&self) -> Vec<f64> {
        self.0.delta().to_vec()
    }

    /// `(gap, bound)` of the pathwise certificate at the current round.
    fn certificate(&self, k_max: f64) -> PyResult<(f64, f64)> {
        let c = self.0.certificate(self.0.rounds(), k_max).map_err(err)?;
        Ok((c.gap, c.bound))
    }
}

/// Scalar regret minimizer with polynomial weights.
#[pyclass(name = "PolynomialWeights")]
struct PyPolynomialWeights(core::regret::PolynomialWeights);

#[pymethods]
impl PyPolynomialWeights {
    #[new]
    fn new(actions: usize) -> Self {
        Self(core::regret::PolynomialWeights::new(actions))
    }

    fn next_action(&self) -> PyMixedAction {
        PyMixedAction(self.0.next_action().clone())
    }

    fn observe(&mut self, payoff: Vec<f64>) -> PyResult<()> {
        self.0.observe(&payoff).map_err(err)
    }

    #[getter]
    fn regret(&self) -> Vec<f64> {
        self.0.regret().to_vec()
    }
}

/// Runs a TOML experiment config; returns the CSV text of the run record.
#[pyfunction]
fn run_config(config_toml: &str) -> PyResult<String> {
    let config = harness::Config::from_toml(config_toml).map_err(err)?;
    let record = harness::run_config(&config).map_err(err)?;
    harness::csvio::to_string(&record).map_err(err)
}

/// Closed forms against oracles: `[(name, max_error, tolerance, passed)]`.
#[pyfunction]
fn verify_targets() -> PyResult<Vec<(String, f64, f64, bool)>> {
    let checks = harness::run_checks(&harness::ClosedForms::default(), harness::VerifyGrids::default(), None)
        .map_err(err)?;
    Ok(checks
        .into_iter()
        .map(|c| {
            let passed = c.passed();
            (c.name, c.max_error, c.tolerance, passed)
        })
        .collect())
}

/// Log-log slope of `(t, distance)` points with `t ≥ t_min`; `None` if a distance is zero.
#[pyfunction]
#[pyo3(signature = (points, t_min = 1))]
fn fit_rate(points: Vec<(usize, f64)>, t_min: usize) -> PyResult<Option<f64>> {
    harness::fit_rate(&points, t_min).map(|f| f.slope()).map_err(err)
}

/// `8 K √(ln A) t^{−1/4} + √2 K t^{−1/2}`.
#[pyfunction]
fn certificate_bound(k_max: f64, actions: usize, t: usize) -> f64 {
    core::blocks::certificate_bound(k_max, actions, t)
}

#[pymodule]
fn approachability_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ApproachabilityError", m.py().get_type::<ApproachabilityError>())?;
    m.add_class::<PyPayoffMatrix>()?;
    m.add_class::<PyMixedAction>()?;
    m.add_class::<PyTargetSet>()?;
    m.add_class::<PyBlockStrategy>()?;
    m.add_class::<PyPolynomialWeights>()?;
    m.add_function(wrap_pyfunction!(combine, m)?)?;
    m.add_function(wrap_pyfunction!(project_to_simplex, m)?)?;
    m.add_function(wrap_pyfunction!(best_response, m)?)?;
    m.add_function(wrap_pyfunction!(phi_star, m)?)?;
    m.add_function(wrap_pyfunction!(example1_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_value, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(verify_targets, m)?)?;
    m.add_function(wrap_pyfunction!(fit_rate, m)?)?;
    m.add_function(wrap_pyfunction!(certificate_bound, m)?)?;
    Ok(())
}
