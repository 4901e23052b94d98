//! Python bindings for the `ks18` library, importable as `pyks18`.

use std::time::Duration;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ks18::algebra::{DensityMatrix, PureState};
use ks18::certify::{self as cert, NoiseParams, TableId, TableSource};
use ks18::graph::ExclusivityGraph;
use ks18::invariants::{self as inv, CoverBudget};
use ks18::ksets::{self, StateCode};
use ks18::quantum::{self, NoiseChannel, Proposition};
use ks18::report::to_canonical_json;

fn err(e: ks18::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A four-dimensional quantum state (density matrix).
#[pyclass(name = "State", module = "pyks18", frozen)]
struct PyState {
    rho: DensityMatrix,
}

#[pymethods]
impl PyState {
    /// Catalogue state by code, e.g. `"v7"` or `"rho28"`.
    #[staticmethod]
    fn catalog(code: &str) -> PyResult<Self> {
        let code: StateCode = code.parse().map_err(err)?;
        Ok(PyState { rho: ksets::catalog_state(code).map_err(err)? })
    }

    /// Pure state from four complex amplitudes; they are normalised.
    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let psi = PureState::normalized(amplitudes).map_err(err)?;
        Ok(PyState { rho: psi.density() })
    }

    /// Haar-random pure state.
    #[staticmethod]
    #[pyo3(signature = (seed = quantum::DEFAULT_SEED))]
    fn random_pure(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PyState { rho: quantum::random_pure_state(&mut rng).density() }
    }

    #[staticmethod]
    #[pyo3(signature = (seed = quantum::DEFAULT_SEED))]
    fn random_mixed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PyState { rho: quantum::random_mixed_state(&mut rng) }
    }

    /// Mixes with white noise at the given visibility.
    fn with_noise(&self, visibility: f64) -> PyResult<Self> {
        let ch = NoiseChannel::visibility(visibility).map_err(err)?;
        Ok(PyState { rho: quantum::apply_noise(&self.rho, ch).map_err(err)? })
    }

    fn sigma(&self) -> PyResult<f64> {
        quantum::sigma(&self.rho).map_err(err)
    }

    fn xi(&self) -> PyResult<f64> {
        quantum::xi(&self.rho).map_err(err)
    }

    /// Sequential probability of a proposition such as `"P(001|012)"`.
    fn probability(&self, proposition: &str) -> PyResult<f64> {
        let p: Proposition = proposition.parse().map_err(err)?;
        quantum::sequential_probability(&self.rho, &p).map_err(err)
    }

    /// The 18 inequality terms with their probabilities.
    fn terms(&self) -> PyResult<Vec<(String, f64)>> {
        let table = quantum::probability_table(&self.rho).map_err(err)?;
        Ok(table.into_iter().map(|(p, v)| (p.to_string(), v)).collect())
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        self.rho.matrix().rows()
    }

    fn __repr__(&self) -> String {
        format!("State(dim={})", self.rho.dim())
    }
}

/// A labelled simple graph.
#[pyclass(name = "Graph", module = "pyks18", frozen)]
struct PyGraph {
    g: ExclusivityGraph,
}

#[pymethods]
impl PyGraph {
    /// Graph on vertices `1..=n` from 0-based index pairs.
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph { g: ExclusivityGraph::from_edges(n, &edges).map_err(err)? })
    }

    /// Orthogonality graph of the 18 built-in vectors.
    #[staticmethod]
    fn ks18() -> PyResult<Self> {
        Ok(PyGraph { g: ksets::orthogonality_graph(&ksets::ks18_vectors()).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.g.n()
    }

    #[getter]
    fn labels(&self) -> Vec<u32> {
        self.g.labels().to_vec()
    }

    fn edge_count(&self) -> usize {
        self.g.edge_count()
    }

    /// Edges as label pairs.
    fn edges(&self) -> Vec<(u32, u32)> {
        self.g.labelled_edges()
    }

    fn complement(&self) -> Self {
        PyGraph { g: self.g.complement() }
    }

    /// `(alpha, witness labels)`.
    fn independence_number(&self) -> PyResult<(usize, Vec<u32>)> {
        let s = inv::independence_number(&self.g).map_err(err)?;
        Ok((s.alpha, s.witness))
    }

    /// `(value, exact "p/q" or None)`.
    fn fractional_packing(&self) -> (f64, Option<String>) {
        let p = inv::fractional_packing(&self.g);
        (p.value, p.exact_value)
    }

    /// Lovász theta by the SDP solver.
    fn lovasz_theta(&self) -> PyResult<f64> {
        Ok(inv::lovasz_theta_sdp(&self.g).map_err(err)?.value)
    }

    /// Minimum clique edge cover of the complement, as a dict.
    #[pyo3(signature = (budget_seconds = 60.0))]
    fn clique_cover<'py>(&self, py: Python<'py>, budget_seconds: f64) -> PyResult<Bound<'py, PyAny>> {
        let time = Duration::try_from_secs_f64(budget_seconds)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let r = inv::clique_edge_cover_complement(&self.g, CoverBudget { time });
        let cliques: Vec<&Vec<u32>> = r.cover.cliques.iter().map(|c| &c.members).collect();
        let doc = serde_json::json!({
            "size": r.cover.len(),
            "minimality": r.minimality,
            "lower_bound": r.lower_bound,
            "valid": r.cover.validate(&self.g).is_ok(),
            "cliques": cliques,
        });
        json_to_py(py, &doc.to_string())
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.g.n(), self.g.edge_count())
    }
}

/// True when no noncontextual 0/1 assignment exists for the 18 built-in vectors.
#[pyfunction]
fn ks18_uncolorable() -> PyResult<bool> {
    let v = ksets::ks18_vectors();
    let g = ksets::orthogonality_graph(&v).map_err(err)?;
    let bases = ksets::find_bases(&g, &v).map_err(err)?;
    Ok(ksets::verify_ks_uncolorability(&g, &bases).is_uncolorable())
}

/// `(epsilon, standard error)` from the embedded exclusivity table.
#[pyfunction]
fn estimate_epsilon() -> PyResult<(f64, f64)> {
    let t = cert::load_table(&TableSource::Embedded(TableId::Exclusivity)).map_err(err)?;
    let e = cert::estimate_epsilon(&t.records).map_err(err)?;
    Ok((e.params.epsilon, e.params.epsilon_uncertainty))
}

#[pyfunction]
fn corrected_bound(epsilon: f64) -> PyResult<f64> {
    cert::corrected_classical_bound(&NoiseParams::new(epsilon, 0.0).map_err(err)?).map_err(err)
}

#[pyfunction]
fn expected_band(epsilon: f64) -> PyResult<(f64, f64)> {
    cert::expected_band(&NoiseParams::new(epsilon, 0.0).map_err(err)?).map_err(err)
}

/// Certifies the embedded 28-state sigma table; epsilon defaults to the estimate.
#[pyfunction]
#[pyo3(signature = (epsilon = None))]
fn certify<'py>(py: Python<'py>, epsilon: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let params = match epsilon {
        Some(e) => NoiseParams::new(e, 0.0).map_err(err)?,
        None => {
            let t = cert::load_table(&TableSource::Embedded(TableId::Exclusivity)).map_err(err)?;
            cert::estimate_epsilon(&t.records).map_err(err)?.params
        }
    };
    let sigma = cert::load_table(&TableSource::Embedded(TableId::SigmaAll)).map_err(err)?;
    let report = cert::certify(&sigma.records, &params).map_err(err)?;
    json_to_py(py, &to_canonical_json(&report))
}

/// Runs the command-line tool in process: `(exit code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let (mut out, mut errs) = (Vec::new(), Vec::new());
    let argv = std::iter::once("ks18".to_string()).chain(args);
    let code = ks18::cli::run(argv, &mut out, &mut errs);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&errs).into_owned(),
    )
}

#[pymodule]
fn pyks18(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(ks18_uncolorable, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(corrected_bound, m)?)?;
    m.add_function(wrap_pyfunction!(expected_band, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("DEFAULT_SEED", quantum::DEFAULT_SEED)?;
    Ok(())
}
