//! Python bindings: the SBM model types, the private estimator, and the
//! exact desk-scale audits, exposed as a `privsbm` extension module.

use privsbm_core as core;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// SBM parameter set (n, K, a, b, beta).
#[pyclass(name = "SbmParams", skip_from_py_object)]
#[derive(Clone)]
struct PySbmParams {
    inner: core::SbmParams,
}

#[pymethods]
impl PySbmParams {
    #[new]
    fn new(n: usize, k: usize, a: f64, b: f64, beta: f64) -> PyResult<Self> {
        Ok(PySbmParams {
            inner: core::SbmParams::new(n, k, a, b, beta).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    /// Closed interval every class size must lie in.
    fn balance_window(&self) -> (f64, f64) {
        self.inner.balance_window()
    }

    fn __repr__(&self) -> String {
        format!(
            "SbmParams(n={}, k={}, a={}, b={}, beta={})",
            self.inner.n(),
            self.inner.k(),
            self.inner.a(),
            self.inner.b(),
            self.inner.beta()
        )
    }
}

/// Community assignment with 1-based labels on the Python side.
#[pyclass(name = "Labeling", skip_from_py_object)]
#[derive(Clone)]
struct PyLabeling {
    inner: core::Labeling,
}

#[pymethods]
impl PyLabeling {
    #[new]
    fn new(labels: Vec<usize>, k: usize) -> PyResult<Self> {
        Ok(PyLabeling {
            inner: core::Labeling::from_one_based(&labels, k).map_err(err)?,
        })
    }

    fn to_list(&self) -> Vec<usize> {
        self.inner.labels().iter().map(|&l| l as usize + 1).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __eq__(&self, other: &PyLabeling) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Labeling([{}])", self.to_list().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "))
    }
}

/// Simple undirected graph.
#[pyclass(name = "Graph", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: core::Graph,
}

#[pymethods]
impl PyGraph {
    /// Build from a vertex count and 0-based edge list.
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph {
            inner: core::Graph::from_edges(n, &edges).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.inner.has_edge(i, j)
    }

    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn degree(&self, v: usize) -> usize {
        self.inner.degree(v)
    }

    /// Text form: `n m` header then 1-based sorted edges.
    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[staticmethod]
    fn parse_text(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: core::Graph::parse_text(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.edge_count())
    }
}

#[pyfunction]
fn sample_sbm(params: &PySbmParams, truth: &PyLabeling, seed: u64) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: core::sample_sbm(&params.inner, &truth.inner, seed).map_err(err)?,
    })
}

#[pyfunction]
fn canonical_balanced(params: &PySbmParams) -> PyResult<PyLabeling> {
    Ok(PyLabeling {
        inner: core::canonical_balanced(&params.inner).map_err(err)?,
    })
}

#[pyfunction]
fn is_balanced(sigma: &PyLabeling, params: &PySbmParams) -> bool {
    core::is_balanced(&sigma.inner, &params.inner)
}

#[pyfunction]
fn enumerate_balanced(params: &PySbmParams) -> PyResult<Vec<PyLabeling>> {
    Ok(core::enumerate_balanced(&params.inner)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyLabeling { inner })
        .collect())
}

#[pyfunction]
fn mismatch_ratio(truth: &PyLabeling, estimate: &PyLabeling, k: usize) -> f64 {
    core::mismatch_ratio(&truth.inner, &estimate.inner, k)
}

/// Node distance as `(value, exact)`.
#[pyfunction]
fn node_distance(g1: &PyGraph, g2: &PyGraph) -> PyResult<(usize, bool)> {
    let d = core::node_distance(&g1.inner, &g2.inner).map_err(err)?;
    Ok((d.value, d.exact))
}

#[pyfunction]
fn renyi_half(params: &PySbmParams) -> PyResult<f64> {
    core::renyi_half(&params.inner).map_err(err)
}

#[pyfunction]
fn chernoff_tilt(params: &PySbmParams) -> PyResult<f64> {
    core::chernoff_tilt(&params.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (params, w=None))]
fn penalty_lambda(params: &PySbmParams, w: Option<f64>) -> PyResult<f64> {
    core::penalty_lambda(&params.inner, w).map_err(err)
}

#[pyfunction]
fn signal(params: &PySbmParams) -> PyResult<f64> {
    core::signal(&params.inner).map_err(err)
}

#[pyfunction]
fn risk_floor(n: usize, epsilon: f64) -> f64 {
    core::risk_floor(n, epsilon)
}

fn build_mechanism(
    params: &core::SbmParams,
    epsilon: f64,
    envelope_c: f64,
    sampler: &str,
    chain_steps: usize,
) -> PyResult<core::MechanismConfig> {
    let sampler = match sampler {
        "exact" => core::SamplerKind::Exact,
        "gumbel" => core::SamplerKind::Gumbel,
        "metropolis" => core::SamplerKind::Metropolis,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown sampler {other:?}; use exact, gumbel, or metropolis"
            )))
        }
    };
    let envelope = core::DegreeEnvelope::new(envelope_c, params.a(), params.n());
    let mut cfg = core::MechanismConfig::new(epsilon, envelope, sampler).map_err(err)?;
    cfg.chain_steps = chain_steps;
    Ok(cfg)
}

/// Run the node-private estimator; returns `(labeling_or_None, record_dict)`.
#[pyfunction]
#[pyo3(signature = (graph, params, epsilon, seed, envelope_c=10.0, sampler="exact", chain_steps=100_000))]
#[allow(clippy::too_many_arguments)]
fn run_private_estimator<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    params: &PySbmParams,
    epsilon: f64,
    seed: u64,
    envelope_c: f64,
    sampler: &str,
    chain_steps: usize,
) -> PyResult<(Option<PyLabeling>, Bound<'py, PyDict>)> {
    let cfg = build_mechanism(&params.inner, epsilon, envelope_c, sampler, chain_steps)?;
    let run = core::run_private_estimator(&graph.inner, &cfg, &params.inner, seed).map_err(err)?;
    let record = PyDict::new(py);
    record.set_item("epsilon", run.record.epsilon)?;
    record.set_item("epsilon0", run.record.epsilon0)?;
    record.set_item("eta", run.record.eta)?;
    record.set_item("envelope_member", run.record.envelope_member)?;
    record.set_item("sampler", &run.record.sampler)?;
    record.set_item("approximate", run.record.approximate)?;
    record.set_item("fallback_applied", run.record.fallback_applied)?;
    record.set_item("n", run.record.n)?;
    record.set_item("K", run.record.k)?;
    record.set_item("a", run.record.a)?;
    record.set_item("b", run.record.b)?;
    record.set_item("beta", run.record.beta)?;
    record.set_item("labeling", run.record.labeling.clone())?;
    record.set_item("seed", run.record.seed)?;
    Ok((run.labeling.map(|inner| PyLabeling { inner }), record))
}

/// Exact Exponential-Mechanism law: `(labelings, probabilities)`.
#[pyfunction]
#[pyo3(signature = (graph, params, epsilon, envelope_c=10.0))]
fn em_probabilities(
    graph: &PyGraph,
    params: &PySbmParams,
    epsilon: f64,
    envelope_c: f64,
) -> PyResult<(Vec<PyLabeling>, Vec<f64>)> {
    let cfg = build_mechanism(&params.inner, epsilon, envelope_c, "exact", 1)?;
    let law = core::exact_output_law(&graph.inner, &cfg, &params.inner).map_err(err)?;
    let probs = law.probs();
    Ok((
        law.support
            .into_iter()
            .map(|inner| PyLabeling { inner })
            .collect(),
        probs,
    ))
}

/// Exhaustive restricted-domain privacy audit at desk scale.
#[pyfunction]
#[pyo3(signature = (params, epsilon, envelope_c=10.0, n_cap=6))]
fn audit_restricted_dp<'py>(
    py: Python<'py>,
    params: &PySbmParams,
    epsilon: f64,
    envelope_c: f64,
    n_cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = build_mechanism(&params.inner, epsilon, envelope_c, "exact", 1)?;
    let report = core::audit_restricted_dp(&params.inner, &cfg, n_cap, true).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("max_log_ratio", report.max_log_ratio)?;
    out.set_item("epsilon_claimed", report.epsilon_claimed)?;
    out.set_item("pass", report.pass)?;
    out.set_item("pairs_checked", report.pairs_checked)?;
    Ok(out)
}

/// Exact two-point lower-bound experiment.
#[pyfunction]
#[pyo3(signature = (params, epsilon, envelope_c=10.0, n_cap=6))]
fn two_point_exact<'py>(
    py: Python<'py>,
    params: &PySbmParams,
    epsilon: f64,
    envelope_c: f64,
    n_cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = build_mechanism(&params.inner, epsilon, envelope_c, "exact", 1)?;
    let report = core::two_point_exact(&params.inner, &cfg, n_cap, true).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("delta_sigma", report.delta_sigma)?;
    out.set_item("delta_sigma_prime", report.delta_sigma_prime)?;
    out.set_item("max_failure", report.max_failure)?;
    out.set_item("floor_nominal", report.floor_nominal)?;
    out.set_item("floor_audited", report.floor_audited)?;
    out.set_item("epsilon_audited", report.epsilon_audited)?;
    out.set_item("pass", report.pass)?;
    Ok(out)
}

#[pymodule]
fn privsbm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySbmParams>()?;
    m.add_class::<PyLabeling>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(sample_sbm, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_balanced, m)?)?;
    m.add_function(wrap_pyfunction!(is_balanced, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_balanced, m)?)?;
    m.add_function(wrap_pyfunction!(mismatch_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(node_distance, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_half, m)?)?;
    m.add_function(wrap_pyfunction!(chernoff_tilt, m)?)?;
    m.add_function(wrap_pyfunction!(penalty_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(signal, m)?)?;
    m.add_function(wrap_pyfunction!(risk_floor, m)?)?;
    m.add_function(wrap_pyfunction!(run_private_estimator, m)?)?;
    m.add_function(wrap_pyfunction!(em_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(audit_restricted_dp, m)?)?;
    m.add_function(wrap_pyfunction!(two_point_exact, m)?)?;
    Ok(())
}
