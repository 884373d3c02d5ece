//! Python bindings: load or generate instances, compute heights, and run the
//! GA, min-min and the plain evaluator from Python.

use std::collections::BTreeMap;

use dagsched::dag::{compute_heights, ready_tasks};
use dagsched::dagio::{self, GenSpec};
use dagsched::ga::{self, CrossoverMode, GaConfig};
use dagsched::minmin::min_min_schedule;
use dagsched::{Chromosome, CommMode, Link, MachineId, Platform, TaskGraph, TaskId, Timeline};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: dagsched::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn comm_mode(comm: bool) -> CommMode {
    if comm {
        CommMode::IncludeTransfer
    } else {
        CommMode::IgnoreTransfer
    }
}

#[pyclass(name = "TaskGraph", module = "pydagsched", frozen)]
pub struct PyTaskGraph {
    inner: TaskGraph,
}

#[pymethods]
impl PyTaskGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = dagio::parse_dag(text).map_err(value_err)?;
        Ok(PyTaskGraph { inner })
    }

    fn to_json(&self) -> String {
        dagio::dag_to_json(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "TaskGraph({} tasks, {} edges)",
            self.inner.len(),
            self.inner.edges().len()
        )
    }

    /// Task ids in declaration order.
    fn task_ids(&self) -> Vec<String> {
        self.inner.tasks().iter().map(|t| t.key.clone()).collect()
    }

    /// `(src, dst, bytes)` triples.
    fn edges(&self) -> Vec<(String, String, f64)> {
        self.inner
            .edges()
            .iter()
            .map(|e| (key(&self.inner, e.src), key(&self.inner, e.dst), e.bytes))
            .collect()
    }

    fn heights(&self) -> BTreeMap<String, u32> {
        let h = compute_heights(&self.inner);
        self.inner
            .ids()
            .map(|t| (key(&self.inner, t), h.get(t)))
            .collect()
    }

    /// Tasks with no parents.
    fn ready(&self) -> Vec<String> {
        ready_tasks(&self.inner, &compute_heights(&self.inner))
            .into_iter()
            .map(|t| key(&self.inner, t))
            .collect()
    }
}

fn key(g: &TaskGraph, t: TaskId) -> String {
    g.task(t).key.clone()
}

#[pyclass(name = "Platform", module = "pydagsched", frozen)]
pub struct PyPlatform {
    inner: Platform,
}

#[pymethods]
impl PyPlatform {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = dagio::parse_platform(text).map_err(value_err)?;
        Ok(PyPlatform { inner })
    }

    /// Machines with the given speeds, all joined by one link.
    #[staticmethod]
    #[pyo3(signature = (speeds, bandwidth = 1.0, latency = 0.0))]
    fn uniform(speeds: Vec<f64>, bandwidth: f64, latency: f64) -> PyResult<Self> {
        let inner = Platform::uniform(&speeds, Link::new(bandwidth, latency)).map_err(value_err)?;
        Ok(PyPlatform { inner })
    }

    fn to_json(&self) -> String {
        dagio::platform_to_json(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Platform({} machines)", self.inner.len())
    }

    fn machine_ids(&self) -> Vec<String> {
        self.inner
            .machines()
            .iter()
            .map(|m| m.key.clone())
            .collect()
    }

    fn speeds(&self) -> Vec<f64> {
        self.inner.machines().iter().map(|m| m.speed).collect()
    }
}

/// A timed schedule. Task and machine ids are the document ids.
#[pyclass(name = "Schedule", module = "pydagsched", frozen, skip_from_py_object)]
#[derive(Clone, Debug)]
pub struct PySchedule {
    #[pyo3(get)]
    pub order: Vec<String>,
    #[pyo3(get)]
    pub machines: Vec<String>,
    #[pyo3(get)]
    pub makespan: f64,
    #[pyo3(get)]
    pub start: BTreeMap<String, f64>,
    #[pyo3(get)]
    pub finish: BTreeMap<String, f64>,
    /// GA generations run; `None` for other algorithms.
    #[pyo3(get)]
    pub iterations: Option<usize>,
    #[pyo3(get)]
    pub log: String,
}

#[pymethods]
impl PySchedule {
    fn __repr__(&self) -> String {
        format!(
            "Schedule(makespan={:.6}, tasks={})",
            self.makespan,
            self.order.len()
        )
    }
}

pub fn make_schedule(
    g: &TaskGraph,
    p: &Platform,
    c: &Chromosome,
    tl: &Timeline,
    iterations: Option<usize>,
) -> dagsched::Result<PySchedule> {
    let mut log = Vec::new();
    dagio::write_schedule_log(g, p, tl, c, &mut log)?;
    let per_task = |v: &[f64]| g.ids().map(|t| (key(g, t), v[t.0])).collect();
    Ok(PySchedule {
        order: c.order.iter().map(|&t| key(g, t)).collect(),
        machines: c
            .machines
            .iter()
            .map(|&m| p.machine(m).key.clone())
            .collect(),
        makespan: tl.makespan,
        start: per_task(&tl.start),
        finish: per_task(&tl.finish),
        iterations,
        log: String::from_utf8_lossy(&log).into_owned(),
    })
}

/// Builds a chromosome from document ids.
pub fn chromosome_from_keys(
    g: &TaskGraph,
    p: &Platform,
    order: &[String],
    machines: &[String],
) -> std::result::Result<Chromosome, String> {
    let order = order
        .iter()
        .map(|k| g.task_id(k).ok_or_else(|| format!("unknown task `{k}`")))
        .collect::<Result<Vec<_>, _>>()?;
    let machines = machines
        .iter()
        .map(|k| {
            p.machine_id(k)
                .ok_or_else(|| format!("unknown machine `{k}`"))
        })
        .collect::<Result<Vec<MachineId>, _>>()?;
    Ok(Chromosome::new(order, machines))
}

fn crossover_mode(name: &str) -> PyResult<CrossoverMode> {
    match name {
        "order" => Ok(CrossoverMode::OrderPreserving),
        "aligned" => Ok(CrossoverMode::TaskAligned),
        "mixed" => Ok(CrossoverMode::Mixed),
        other => Err(PyValueError::new_err(format!(
            "crossover must be order, aligned or mixed, got `{other}`"
        ))),
    }
}

#[pyfunction]
#[pyo3(signature = (
    graph, platform, *, seed = 0, comm = true, pop_size = 100, iters = 50,
    stagnation = None, pairs = None, mutation_rate = 0.2, crossover = "mixed",
    heuristic_seeds = 1
))]
#[allow(clippy::too_many_arguments)]
fn schedule_ga(
    py: Python<'_>,
    graph: PyRef<'_, PyTaskGraph>,
    platform: PyRef<'_, PyPlatform>,
    seed: u64,
    comm: bool,
    pop_size: usize,
    iters: usize,
    stagnation: Option<usize>,
    pairs: Option<usize>,
    mutation_rate: f64,
    crossover: &str,
    heuristic_seeds: usize,
) -> PyResult<PySchedule> {
    let base = GaConfig::with_pop_size(pop_size);
    let cfg = GaConfig {
        max_iters: iters,
        stagnation_limit: stagnation.unwrap_or(iters),
        pairs_per_generation: pairs.unwrap_or(base.pairs_per_generation),
        crossover_mode: crossover_mode(crossover)?,
        mutation_rate,
        heuristic_seed_count: heuristic_seeds,
        rng_seed: seed,
        ..base
    };
    let (g, p) = (&graph.inner, &platform.inner);
    py.detach(|| {
        let r = ga::run(g, p, &cfg, comm_mode(comm))?;
        make_schedule(g, p, &r.best, &r.timeline, Some(r.stats.iterations))
    })
    .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (graph, platform, *, comm = true))]
fn schedule_minmin(
    graph: PyRef<'_, PyTaskGraph>,
    platform: PyRef<'_, PyPlatform>,
    comm: bool,
) -> PyResult<PySchedule> {
    let (g, p) = (&graph.inner, &platform.inner);
    let (c, tl) = min_min_schedule(g, p, comm_mode(comm)).map_err(value_err)?;
    make_schedule(g, p, &c, &tl, None).map_err(value_err)
}

/// Times a given order and machine assignment (parallel lists of ids).
#[pyfunction]
#[pyo3(signature = (graph, platform, order, machines, *, comm = true))]
fn evaluate(
    graph: PyRef<'_, PyTaskGraph>,
    platform: PyRef<'_, PyPlatform>,
    order: Vec<String>,
    machines: Vec<String>,
    comm: bool,
) -> PyResult<PySchedule> {
    let (g, p) = (&graph.inner, &platform.inner);
    let c = chromosome_from_keys(g, p, &order, &machines).map_err(PyValueError::new_err)?;
    let tl = dagsched::simulate(g, p, &c, comm_mode(comm)).map_err(value_err)?;
    make_schedule(g, p, &c, &tl, None).map_err(value_err)
}

#[pyfunction]
fn lower_bound(graph: PyRef<'_, PyTaskGraph>, platform: PyRef<'_, PyPlatform>) -> PyResult<f64> {
    platform
        .inner
        .check_compatible(&graph.inner)
        .map_err(value_err)?;
    Ok(dagsched::lower_bound(&graph.inner, &platform.inner))
}

#[pyfunction]
#[pyo3(signature = (
    tasks, *, width = 3, ccr = 0.5, work_min = 5.0, work_max = 25.0,
    bandwidth = 1.0, seed = 0
))]
fn generate_dag(
    tasks: usize,
    width: usize,
    ccr: f64,
    work_min: f64,
    work_max: f64,
    bandwidth: f64,
    seed: u64,
) -> PyResult<PyTaskGraph> {
    let spec = GenSpec {
        n_tasks: tasks,
        width,
        ccr,
        work_range: (work_min, work_max),
        bandwidth,
        seed,
    };
    let (inner, _) = dagio::generate_random_dag(&spec).map_err(value_err)?;
    Ok(PyTaskGraph { inner })
}

#[pyfunction]
#[pyo3(signature = (
    machines, *, speed_min = 1.0, speed_max = 2.0, bandwidth = 1.0,
    latency = 0.0, seed = 0
))]
fn generate_platform(
    machines: usize,
    speed_min: f64,
    speed_max: f64,
    bandwidth: f64,
    latency: f64,
    seed: u64,
) -> PyResult<PyPlatform> {
    let inner = dagio::generate_platform(
        machines,
        (speed_min, speed_max),
        Link::new(bandwidth, latency),
        seed,
    )
    .map_err(value_err)?;
    Ok(PyPlatform { inner })
}

#[pymodule]
fn pydagsched(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTaskGraph>()?;
    m.add_class::<PyPlatform>()?;
    m.add_class::<PySchedule>()?;
    m.add_function(wrap_pyfunction!(schedule_ga, m)?)?;
    m.add_function(wrap_pyfunction!(schedule_minmin, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(generate_dag, m)?)?;
    m.add_function(wrap_pyfunction!(generate_platform, m)?)?;
    Ok(())
}
