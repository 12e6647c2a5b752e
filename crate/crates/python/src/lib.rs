//! Python bindings for `dmpa_core`.

use std::collections::BTreeMap;

use dmpa_core::analytic::{glass_ceiling, DEFAULT_GCE_TOL, DEFAULT_MAX_ITER, DEFAULT_TOL};
use dmpa_core::estimate::{degree_histogram, fit_power_law as fit, gce_statistic, DegreeHistogram, Direction};
use dmpa_core::sim::{read_edge_list, simulate as run_sim, write_edge_list, GrowthGraph, SimConfig};
use dmpa_core::{analysis_view, exponents_both_groups, validate_params, Color, ExponentReport, ModelParams};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_color(s: &str) -> PyResult<Color> {
    match s.to_ascii_lowercase().as_str() {
        "r" | "red" => Ok(Color::Red),
        "b" | "blue" => Ok(Color::Blue),
        _ => Err(PyValueError::new_err(format!("unknown color {s:?}; use 'red' or 'blue'"))),
    }
}

fn parse_direction(s: &str) -> PyResult<Direction> {
    match s.to_ascii_lowercase().as_str() {
        "in" => Ok(Direction::In),
        "out" => Ok(Direction::Out),
        _ => Err(PyValueError::new_err(format!("unknown direction {s:?}; use 'in' or 'out'"))),
    }
}

/// Validated model parameters with one homophily matrix for all events.
#[pyclass(name = "Params", frozen)]
struct PyParams {
    inner: ModelParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (r, p, q, rho_blue, rho_red, delta, delta_out = None))]
    fn new(r: f64, p: f64, q: f64, rho_blue: f64, rho_red: f64, delta: f64, delta_out: Option<f64>) -> PyResult<Self> {
        let mut raw = ModelParams::shared(r, p, q, rho_blue, rho_red, delta);
        if let Some(d) = delta_out {
            raw.delta_out = d;
        }
        validate_params(raw).map(|inner| PyParams { inner }).map_err(value_err)
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }
    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }
    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }
    #[getter]
    fn delta_in(&self) -> f64 {
        self.inner.delta_in
    }
    #[getter]
    fn delta_out(&self) -> f64 {
        self.inner.delta_out
    }

    /// True when the parameters admit the analytic solution.
    fn is_analytic(&self) -> bool {
        analysis_view(&self.inner).is_ok()
    }

    fn __repr__(&self) -> String {
        let m = &self.inner;
        format!(
            "Params(r={}, p={}, q={}, rho_blue={}, rho_red={}, delta_in={}, delta_out={})",
            m.r, m.p, m.q, m.e1.rho_blue, m.e1.rho_red, m.delta_in, m.delta_out
        )
    }
}

/// Limiting degree shares and exponent constants for both groups.
#[pyclass(name = "ExponentReport", frozen)]
struct PyReport {
    inner: ExponentReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn theta_star(&self) -> (f64, f64) {
        let t = self.inner.theta_star;
        (t.theta_in(), t.theta_out())
    }

    /// `(c_in, c_out)` for `group`.
    fn constants(&self, group: &str) -> PyResult<(f64, f64)> {
        let c = match parse_color(group)? {
            Color::Red => self.inner.red,
            Color::Blue => self.inner.blue,
        };
        Ok((c.c_in, c.c_out))
    }

    /// `(gamma_in, gamma_out)` for `group`; `inf` when a constant is zero.
    fn exponents(&self, group: &str) -> PyResult<(f64, f64)> {
        let c = match parse_color(group)? {
            Color::Red => self.inner.red,
            Color::Blue => self.inner.blue,
        };
        Ok((c.gamma_in().value(), c.gamma_out().value()))
    }

    #[getter]
    fn derivation(&self) -> String {
        self.inner.derivation.to_string()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.fixed_point.iterations
    }

    #[getter]
    fn contraction_norm(&self) -> Option<f64> {
        self.inner.fixed_point.contraction_norm
    }

    /// `(verdict, red_score, blue_score)`.
    fn glass_ceiling(&self) -> PyResult<(String, f64, f64)> {
        let v = glass_ceiling(&self.inner, DEFAULT_GCE_TOL).map_err(runtime_err)?;
        Ok((v.verdict.to_string(), v.red_score, v.blue_score))
    }

    /// The flat JSON report as a dict.
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let text = self.inner.to_json().to_string();
        py.import("json")?.call_method1("loads", (text,))
    }
}

/// Solves for the limiting shares and exponents.
#[pyfunction]
#[pyo3(signature = (params, tol = DEFAULT_TOL, max_iter = DEFAULT_MAX_ITER))]
fn solve(params: &PyParams, tol: f64, max_iter: usize) -> PyResult<PyReport> {
    let ap = analysis_view(&params.inner).map_err(value_err)?;
    exponents_both_groups(&ap, tol, max_iter, None)
        .map(|inner| PyReport { inner })
        .map_err(runtime_err)
}

#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: GrowthGraph,
}

#[pymethods]
impl PyGraph {
    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }
    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }
    /// `(source, target)` pairs; the target follows the source.
    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().to_vec()
    }
    /// `'R'` or `'B'` per node.
    fn colors(&self) -> Vec<char> {
        self.inner.colors().iter().map(|c| c.tag()).collect()
    }
    fn in_degrees(&self) -> Vec<u64> {
        self.inner.in_degrees().to_vec()
    }
    fn out_degrees(&self) -> Vec<u64> {
        self.inner.out_degrees().to_vec()
    }
    /// Red shares of in- and out-degree mass, or `None` without edges.
    fn theta(&self) -> Option<(f64, f64)> {
        self.inner.theta().map(|t| (t.theta_in(), t.theta_out()))
    }

    /// `{degree: count}` for one group and direction.
    fn degree_histogram(&self, group: &str, direction: &str) -> PyResult<BTreeMap<u64, u64>> {
        Ok(degree_histogram(&self.inner, parse_color(group)?, parse_direction(direction)?).counts)
    }

    /// Tail counts and ratio at threshold `k`.
    fn gce_statistic<'py>(&self, py: Python<'py>, k: u64) -> PyResult<Bound<'py, PyDict>> {
        let s = gce_statistic(&self.inner, k).map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("k", s.k)?;
        d.set_item("top_out_red", s.top_out_red)?;
        d.set_item("top_in_red", s.top_in_red)?;
        d.set_item("top_out_blue", s.top_out_blue)?;
        d.set_item("top_in_blue", s.top_in_blue)?;
        d.set_item("ratio", s.ratio.value())?;
        Ok(d)
    }

    fn to_edge_list(&self) -> String {
        let mut buf = Vec::new();
        write_edge_list(&self.inner, &mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("edge lists are ASCII")
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        read_edge_list(text.as_bytes())
            .map(|inner| PyGraph { inner })
            .map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

/// Grows a graph for `steps` steps from the default two-node seed graph.
#[pyfunction]
fn simulate(py: Python<'_>, params: &PyParams, seed: u64, steps: u64) -> PyResult<PyGraph> {
    let cfg = SimConfig::new(params.inner, seed, steps);
    let (g, _) = py.detach(|| run_sim(&cfg)).map_err(runtime_err)?;
    Ok(PyGraph { inner: g })
}

/// Discrete power-law fit to a `{degree: count}` mapping. Without `k_min`
/// the cutoff minimizing the KS distance is chosen.
#[pyfunction]
#[pyo3(signature = (counts, k_min = None))]
fn fit_power_law<'py>(py: Python<'py>, counts: BTreeMap<u64, u64>, k_min: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
    let hist = DegreeHistogram {
        counts,
        ..DegreeHistogram::new(Color::Red, Direction::In)
    };
    let f = fit(&hist, k_min).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("gamma_hat", f.gamma_hat)?;
    d.set_item("k_min", f.k_min)?;
    d.set_item("n_tail", f.n_tail)?;
    d.set_item("stderr", f.stderr)?;
    d.set_item("ks", f.ks)?;
    Ok(d)
}

#[pymodule]
fn dmpa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    Ok(())
}
