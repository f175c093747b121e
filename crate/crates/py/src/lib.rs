//! Python bindings: `import triadic`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use triadic_core::experiments::exhaustive_small_oracle as exact_oracle;
use triadic_core::pexpr::PExpr;
use triadic_core::stats::chernoff_bounds as chernoff;
use triadic_core::{Error, HubPairPolicy, StatsLevel};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Parameters of one process run.
#[pyclass(name = "ProcessConfig", module = "triadic", skip_from_py_object)]
#[derive(Clone)]
pub struct PyProcessConfig {
    inner: triadic_core::ProcessConfig,
}

#[pymethods]
impl PyProcessConfig {
    /// `p` is a float or an expression in `n` such as `"0.8*n^-0.5"`.
    #[new]
    #[pyo3(signature = (n, p, seed, r = 3, max_rounds = None, hub_pairs = "exclude", stats = "off"))]
    fn new(
        n: usize,
        p: &Bound<'_, PyAny>,
        seed: u64,
        r: usize,
        max_rounds: Option<u32>,
        hub_pairs: &str,
        stats: &str,
    ) -> PyResult<Self> {
        let p = match p.extract::<f64>() {
            Ok(x) => x,
            Err(_) => {
                let text: String = p.extract()?;
                let expr: PExpr = text.parse().map_err(|e| to_py(Error::from(e)))?;
                expr.eval(n, r).map_err(|e| to_py(e.into()))?
            }
        };
        let policy: HubPairPolicy = hub_pairs.parse().map_err(|e| to_py(Error::from(e)))?;
        let level: StatsLevel = stats.parse().map_err(|e| to_py(Error::from(e)))?;
        let mut inner = triadic_core::ProcessConfig::new(n, r, p, seed)
            .with_hub_pairs(policy)
            .with_stats(level);
        if let Some(m) = max_rounds {
            inner.max_rounds = m;
        }
        inner.validate().map_err(|e| to_py(e.into()))?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn max_rounds(&self) -> u32 {
        self.inner.max_rounds
    }

    /// Number of non-hub vertex pairs, the size of a complete final graph.
    fn nonhub_pairs(&self) -> u64 {
        self.inner.nonhub_pairs()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!("ProcessConfig(n={}, r={}, p={}, seed={}, max_rounds={})", c.n, c.r, c.p, c.seed, c.max_rounds)
    }
}

#[pyclass(name = "ProcessResult", module = "triadic", frozen)]
pub struct PyProcessResult {
    inner: triadic_core::ProcessResult,
}

#[pymethods]
impl PyProcessResult {
    #[getter]
    fn rounds_run(&self) -> u32 {
        self.inner.rounds_run
    }

    #[getter]
    fn terminated(&self) -> bool {
        self.inner.terminated
    }

    #[getter]
    fn final_edges_nonhub(&self) -> u64 {
        self.inner.final_edges_nonhub
    }

    #[getter]
    fn complete(&self) -> bool {
        self.inner.complete()
    }

    #[getter]
    fn cap_hit(&self) -> bool {
        self.inner.cap_hit()
    }

    /// Per-round reports as a list of dicts.
    #[getter]
    fn per_round<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner.per_round)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "ProcessResult(rounds_run={}, terminated={}, final_edges_nonhub={})",
            self.inner.rounds_run,
            if self.inner.terminated { "True" } else { "False" },
            self.inner.final_edges_nonhub
        )
    }
}

/// A run that can be advanced one round at a time.
#[pyclass(name = "Simulation", module = "triadic")]
pub struct PySimulation {
    inner: Option<triadic_core::Simulation>,
}

impl PySimulation {
    fn sim(&self) -> PyResult<&triadic_core::Simulation> {
        self.inner
            .as_ref()
            .ok_or_else(|| PyRuntimeError::new_err("simulation already consumed by run()"))
    }
}

#[pymethods]
impl PySimulation {
    #[new]
    fn new(config: &PyProcessConfig) -> PyResult<Self> {
        let sim = triadic_core::Simulation::new(config.inner.clone()).map_err(to_py)?;
        Ok(Self { inner: Some(sim) })
    }

    /// Runs the next round. Returns its report as a dict, or None once no
    /// open walks remain.
    fn step<'py>(&mut self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        let sim = self
            .inner
            .as_mut()
            .ok_or_else(|| PyRuntimeError::new_err("simulation already consumed by run()"))?;
        match sim.step().map_err(to_py)? {
            Some(report) => Ok(Some(json_to_py(py, report)?)),
            None => Ok(None),
        }
    }

    /// Runs to the end. The simulation cannot be used afterwards.
    fn run(&mut self, py: Python<'_>) -> PyResult<PyProcessResult> {
        let sim = self
            .inner
            .take()
            .ok_or_else(|| PyRuntimeError::new_err("simulation already consumed by run()"))?;
        let inner = py.detach(move || sim.run()).map_err(to_py)?;
        Ok(PyProcessResult { inner })
    }

    #[getter]
    fn current_round(&self) -> PyResult<u32> {
        Ok(self.sim()?.state().current_round())
    }

    #[getter]
    fn nonhub_edge_count(&self) -> PyResult<usize> {
        Ok(self.sim()?.state().nonhub_edge_count())
    }

    #[getter]
    fn finished(&self) -> PyResult<bool> {
        Ok(self.sim()?.finished())
    }

    /// All edges as `((u, v), round)` tuples.
    fn edges(&self) -> PyResult<Vec<((u32, u32), u32)>> {
        Ok(self.sim()?.state().edges())
    }
}

#[pyfunction]
fn run_process(py: Python<'_>, config: &PyProcessConfig) -> PyResult<PyProcessResult> {
    let cfg = config.inner.clone();
    let inner = py.detach(move || triadic_core::run_process(&cfg)).map_err(to_py)?;
    Ok(PyProcessResult { inner })
}

/// Exact `(expectation, {final_edges: probability})` for a tiny instance.
#[pyfunction]
fn exhaustive_small_oracle<'py>(py: Python<'py>, config: &PyProcessConfig) -> PyResult<(f64, Bound<'py, PyDict>)> {
    let exact = exact_oracle(&config.inner).map_err(to_py)?;
    let dist = PyDict::new(py);
    for (k, w) in &exact.distribution {
        dist.set_item(k, w)?;
    }
    Ok((exact.expectation, dist))
}

/// `(two_sided, upper)` tail bounds for `Bin(n_trials, p)` at deviation `t`.
#[pyfunction]
fn chernoff_bounds(n_trials: u64, p: f64, t: f64) -> PyResult<(f64, f64)> {
    let b = chernoff(n_trials, p, t).map_err(to_py)?;
    Ok((b.two_sided, b.upper))
}

/// Evaluates a probability expression at vertex count `n`.
#[pyfunction]
#[pyo3(signature = (expr, n, r = 3))]
fn eval_p(expr: &str, n: usize, r: usize) -> PyResult<f64> {
    let p: PExpr = expr.parse().map_err(|e| to_py(Error::from(e)))?;
    p.eval(n, r).map_err(|e| to_py(e.into()))
}

#[pymodule]
fn triadic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProcessConfig>()?;
    m.add_class::<PyProcessResult>()?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(run_process, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_small_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(chernoff_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(eval_p, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
