//! Python bindings: `import shakebal`.

use std::cell::RefCell;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use shakebal::objective::{self, ObjectiveSpec, DEFAULT_PENALTY, DEFAULT_SAMPLES};
use shakebal::optimizers::{self, Algorithm, Bounds};
use shakebal::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::Config { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Mechanism parameters in SI units; angles in radians.
#[pyclass(name = "MechanismConfig", module = "shakebal", skip_from_py_object)]
#[derive(Clone)]
struct PyMechanismConfig {
    #[pyo3(get, set)]
    crank_mass: f64,
    #[pyo3(get, set)]
    slider_mass: f64,
    #[pyo3(get, set)]
    crank_radius: f64,
    #[pyo3(get, set)]
    rod_length: f64,
    #[pyo3(get, set)]
    omega: f64,
    #[pyo3(get, set)]
    unbalance_mass: f64,
    #[pyo3(get, set)]
    unbalance_radius: f64,
    #[pyo3(get, set)]
    unbalance_angle: f64,
    #[pyo3(get, set)]
    outer_spacing: f64,
    #[pyo3(get, set)]
    inner_spacing: f64,
    #[pyo3(get, set)]
    phase: f64,
    #[pyo3(get, set)]
    counterweight_radius_1: f64,
    #[pyo3(get, set)]
    counterweight_radius_2: f64,
}

impl From<shakebal::MechanismConfig> for PyMechanismConfig {
    fn from(c: shakebal::MechanismConfig) -> Self {
        Self {
            crank_mass: c.crank_mass,
            slider_mass: c.slider_mass,
            crank_radius: c.crank_radius,
            rod_length: c.rod_length,
            omega: c.omega,
            unbalance_mass: c.unbalance_mass,
            unbalance_radius: c.unbalance_radius,
            unbalance_angle: c.unbalance_angle,
            outer_spacing: c.outer_spacing,
            inner_spacing: c.inner_spacing,
            phase: c.phase,
            counterweight_radius_1: c.counterweight_radius_1,
            counterweight_radius_2: c.counterweight_radius_2,
        }
    }
}

impl PyMechanismConfig {
    fn core(&self) -> PyResult<shakebal::MechanismConfig> {
        shakebal::MechanismConfig {
            crank_mass: self.crank_mass,
            slider_mass: self.slider_mass,
            crank_radius: self.crank_radius,
            rod_length: self.rod_length,
            omega: self.omega,
            unbalance_mass: self.unbalance_mass,
            unbalance_radius: self.unbalance_radius,
            unbalance_angle: self.unbalance_angle,
            outer_spacing: self.outer_spacing,
            inner_spacing: self.inner_spacing,
            phase: self.phase,
            counterweight_radius_1: self.counterweight_radius_1,
            counterweight_radius_2: self.counterweight_radius_2,
        }
        .validated()
        .map_err(to_py)
    }
}

#[pymethods]
impl PyMechanismConfig {
    /// Built-in defaults; any field may be overridden by keyword.
    #[new]
    #[pyo3(signature = (**overrides))]
    fn new(overrides: Option<&Bound<'_, pyo3::types::PyDict>>) -> PyResult<Self> {
        let mut cfg: Self = shakebal::MechanismConfig::default().into();
        if let Some(kw) = overrides {
            for (key, value) in kw.iter() {
                let key: String = key.extract()?;
                let value: f64 = value.extract()?;
                let slot = match key.as_str() {
                    "crank_mass" => &mut cfg.crank_mass,
                    "slider_mass" => &mut cfg.slider_mass,
                    "crank_radius" => &mut cfg.crank_radius,
                    "rod_length" => &mut cfg.rod_length,
                    "omega" => &mut cfg.omega,
                    "unbalance_mass" => &mut cfg.unbalance_mass,
                    "unbalance_radius" => &mut cfg.unbalance_radius,
                    "unbalance_angle" => &mut cfg.unbalance_angle,
                    "outer_spacing" => &mut cfg.outer_spacing,
                    "inner_spacing" => &mut cfg.inner_spacing,
                    "phase" => &mut cfg.phase,
                    "counterweight_radius_1" => &mut cfg.counterweight_radius_1,
                    "counterweight_radius_2" => &mut cfg.counterweight_radius_2,
                    other => return Err(PyValueError::new_err(format!("unknown field `{other}`"))),
                };
                *slot = value;
            }
        }
        cfg.core()?;
        Ok(cfg)
    }

    fn __repr__(&self) -> String {
        format!(
            "MechanismConfig(crank_mass={}, slider_mass={}, crank_radius={}, rod_length={}, omega={}, \
             unbalance_mass={}, unbalance_radius={}, unbalance_angle={}, outer_spacing={}, inner_spacing={}, \
             phase={}, counterweight_radius_1={}, counterweight_radius_2={})",
            self.crank_mass,
            self.slider_mass,
            self.crank_radius,
            self.rod_length,
            self.omega,
            self.unbalance_mass,
            self.unbalance_radius,
            self.unbalance_angle,
            self.outer_spacing,
            self.inner_spacing,
            self.phase,
            self.counterweight_radius_1,
            self.counterweight_radius_2
        )
    }
}

/// Counterweights `(m1, m2, phi1, phi2)`; angles are normalized to `[0, 2π)`.
#[pyclass(name = "DecisionVector", module = "shakebal", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyDecisionVector(shakebal::DecisionVector);

#[pymethods]
impl PyDecisionVector {
    #[new]
    #[pyo3(signature = (m1=0.0, m2=0.0, phi1=0.0, phi2=0.0))]
    fn new(m1: f64, m2: f64, phi1: f64, phi2: f64) -> PyResult<Self> {
        shakebal::DecisionVector::new(m1, m2, phi1, phi2)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn m1(&self) -> f64 {
        self.0.m1()
    }

    #[getter]
    fn m2(&self) -> f64 {
        self.0.m2()
    }

    #[getter]
    fn phi1(&self) -> f64 {
        self.0.phi1()
    }

    #[getter]
    fn phi2(&self) -> f64 {
        self.0.phi2()
    }

    fn as_list(&self) -> Vec<f64> {
        self.0.to_point().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "DecisionVector(m1={}, m2={}, phi1={}, phi2={})",
            self.0.m1(),
            self.0.m2(),
            self.0.phi1(),
            self.0.phi2()
        )
    }
}

#[pyclass(name = "CostBreakdown", module = "shakebal", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyCostBreakdown(objective::CostBreakdown);

#[pymethods]
impl PyCostBreakdown {
    #[getter]
    fn raw_cost(&self) -> f64 {
        self.0.raw_cost
    }

    #[getter]
    fn c1(&self) -> f64 {
        self.0.c1
    }

    #[getter]
    fn c2(&self) -> f64 {
        self.0.c2
    }

    #[getter]
    fn violation(&self) -> f64 {
        self.0.violation
    }

    #[getter]
    fn total(&self) -> f64 {
        self.0.total
    }

    fn is_feasible(&self) -> bool {
        self.0.is_feasible()
    }

    fn __repr__(&self) -> String {
        format!(
            "CostBreakdown(raw_cost={}, c1={}, c2={}, violation={}, total={})",
            self.0.raw_cost, self.0.c1, self.0.c2, self.0.violation, self.0.total
        )
    }
}

#[pyclass(name = "RunResult", module = "shakebal", frozen, skip_from_py_object)]
struct PyRunResult(optimizers::RunResult);

#[pymethods]
impl PyRunResult {
    #[getter]
    fn best_x(&self) -> Vec<f64> {
        self.0.best_x.clone()
    }

    #[getter]
    fn best_f(&self) -> f64 {
        self.0.best_f
    }

    /// Best-so-far value after initialization and after each iteration.
    #[getter]
    fn trace(&self) -> Vec<f64> {
        self.0.trace.clone()
    }

    #[getter]
    fn evaluations(&self) -> usize {
        self.0.evaluations
    }

    #[getter]
    fn wall_time_s(&self) -> f64 {
        self.0.wall_time.as_secs_f64()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(best_f={}, best_x={:?}, evaluations={}, seed={})",
            self.0.best_f, self.0.best_x, self.0.evaluations, self.0.seed
        )
    }
}

fn parse_algorithm(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(|e: Error| PyValueError::new_err(e.to_string()))
}

fn params_for(
    algorithm: Algorithm,
    iterations: Option<usize>,
    population: Option<usize>,
) -> optimizers::OptimizerParams {
    let mut params = shakebal::bench::AlgorithmSettings::default().params(algorithm);
    if let Some(n) = population {
        match &mut params {
            optimizers::OptimizerParams::Pso(p) => p.population = n,
            optimizers::OptimizerParams::Abc(p) => p.food_sources = n,
            optimizers::OptimizerParams::Bga(p) => p.population = n,
            optimizers::OptimizerParams::Hgapso(p) => p.population = n,
        }
    }
    match iterations {
        Some(it) => params.with_iterations(it),
        None => params,
    }
}

fn spec_for(
    cfg: &shakebal::MechanismConfig,
    n_samples: usize,
    c1_max: f64,
    c2_max: f64,
    penalty_weight: f64,
) -> ObjectiveSpec {
    ObjectiveSpec {
        n_samples,
        c1_max,
        c2_max,
        penalty_weight,
        ..ObjectiveSpec::for_mechanism(cfg)
    }
}

/// Cost, constraint integrals and penalized total of one decision vector.
#[pyfunction]
#[pyo3(signature = (cfg, dv, n_samples=DEFAULT_SAMPLES, c1_max=f64::INFINITY, c2_max=f64::INFINITY, penalty_weight=DEFAULT_PENALTY))]
fn evaluate(
    cfg: PyRef<'_, PyMechanismConfig>,
    dv: PyRef<'_, PyDecisionVector>,
    n_samples: usize,
    c1_max: f64,
    c2_max: f64,
    penalty_weight: f64,
) -> PyResult<PyCostBreakdown> {
    let cfg = cfg.core()?;
    let spec = spec_for(&cfg, n_samples, c1_max, c2_max, penalty_weight);
    objective::evaluate(&cfg, &dv.0, &spec)
        .map(PyCostBreakdown)
        .map_err(to_py)
}

type Sample = (f64, f64, f64, f64, f64);

/// `(theta, P1, P2, P3, P4)` tuples on a uniform grid over one revolution.
#[pyfunction]
#[pyo3(signature = (cfg, dv, n_samples=360))]
fn sample_profile(
    cfg: PyRef<'_, PyMechanismConfig>,
    dv: PyRef<'_, PyDecisionVector>,
    n_samples: usize,
) -> PyResult<Vec<Sample>> {
    let samples = shakebal::mechanism::sample_profile(&cfg.core()?, &dv.0, n_samples).map_err(to_py)?;
    Ok(samples.into_iter().map(|s| (s.theta, s.p1, s.p2, s.p3, s.p4)).collect())
}

/// `½ Σ r_k² Δθ` for radii sampled uniformly over one revolution.
#[pyfunction]
fn polar_area(radii: Vec<f64>) -> PyResult<f64> {
    objective::polar_area(&radii).map_err(to_py)
}

/// `(c1_max, c2_max)` as `fraction` of the largest moment areas seen over
/// `n_random` uniform samples of the default box.
#[pyfunction]
#[pyo3(signature = (cfg, n_random=1000, fraction=0.5, seed=0, n_samples=DEFAULT_SAMPLES))]
fn calibrate_bounds(
    cfg: PyRef<'_, PyMechanismConfig>,
    n_random: usize,
    fraction: f64,
    seed: u64,
    n_samples: usize,
) -> PyResult<(f64, f64)> {
    let cfg = cfg.core()?;
    let bounds = objective::default_bounds(&cfg);
    objective::calibrate_bounds(&cfg, &bounds, n_samples, n_random, fraction, seed).map_err(to_py)
}

/// Minimizes a Python callable over the box `[lower, upper]`.
#[pyfunction]
#[pyo3(signature = (objective, lower, upper, algorithm="pso", iterations=None, population=None, seed=1))]
#[allow(clippy::too_many_arguments)]
fn optimize(
    objective: Bound<'_, PyAny>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    algorithm: &str,
    iterations: Option<usize>,
    population: Option<usize>,
    seed: u64,
) -> PyResult<PyRunResult> {
    let bounds = Bounds::new(lower, upper).map_err(to_py)?;
    let params = params_for(parse_algorithm(algorithm)?, iterations, population);
    let raised: RefCell<Option<PyErr>> = RefCell::new(None);
    let f = |x: &[f64]| -> f64 {
        if raised.borrow().is_some() {
            return f64::NAN;
        }
        match objective.call1((x.to_vec(),)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                *raised.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    };
    let result = optimizers::optimize(f, &bounds, &params, seed);
    if let Some(e) = raised.into_inner() {
        return Err(e);
    }
    result.map(PyRunResult).map_err(to_py)
}

/// Optimizes the counterweights of `cfg`. Missing constraint bounds are
/// calibrated with the built-in settings. Returns the run and the cost
/// breakdown of its best point.
#[pyfunction]
#[pyo3(signature = (cfg, algorithm="pso", iterations=None, seed=1, c1_max=None, c2_max=None, n_samples=DEFAULT_SAMPLES))]
#[allow(clippy::too_many_arguments)]
fn balance(
    py: Python<'_>,
    cfg: PyRef<'_, PyMechanismConfig>,
    algorithm: &str,
    iterations: Option<usize>,
    seed: u64,
    c1_max: Option<f64>,
    c2_max: Option<f64>,
    n_samples: usize,
) -> PyResult<(PyRunResult, PyCostBreakdown)> {
    let cfg = cfg.core()?;
    let params = params_for(parse_algorithm(algorithm)?, iterations, None);
    let outcome = py.detach(|| -> Result<_, Error> {
        let base = ObjectiveSpec {
            n_samples,
            ..ObjectiveSpec::for_mechanism(&cfg)
        };
        let (c1, c2) = match (c1_max, c2_max) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                let (a, b) = objective::calibrate_bounds(&cfg, &base.bounds, n_samples, 1000, 0.5, 0)?;
                (c1_max.unwrap_or(a), c2_max.unwrap_or(b))
            }
        };
        let problem = shakebal::BalancingProblem::new(
            cfg,
            ObjectiveSpec {
                c1_max: c1,
                c2_max: c2,
                ..base
            },
        )?;
        let run = optimizers::optimize(|x| problem.cost(x), problem.bounds(), &params, seed)?;
        let best = problem.evaluate(&shakebal::DecisionVector::from_point(&run.best_x)?);
        Ok((run, best))
    });
    let (run, best) = outcome.map_err(to_py)?;
    Ok((PyRunResult(run), PyCostBreakdown(best)))
}

/// Counterweight that cancels the unbalance mass on its own disk.
#[pyfunction]
fn same_plane_cancellation(cfg: PyRef<'_, PyMechanismConfig>) -> PyResult<PyDecisionVector> {
    Ok(PyDecisionVector(objective::same_plane_cancellation(&cfg.core()?)))
}

#[pymodule(name = "shakebal")]
fn shakebal_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyMechanismConfig>()?;
    m.add_class::<PyDecisionVector>()?;
    m.add_class::<PyCostBreakdown>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_profile, m)?)?;
    m.add_function(wrap_pyfunction!(polar_area, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(balance, m)?)?;
    m.add_function(wrap_pyfunction!(same_plane_cancellation, m)?)?;
    Ok(())
}
