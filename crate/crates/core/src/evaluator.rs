//! Schedule simulation. A chromosome is replayed position by position; each
//! machine runs its tasks in chromosome order with no backfilling.

use serde::{Deserialize, Serialize};

use crate::dag::{TaskGraph, TaskId};
use crate::error::{Error, Result};
use crate::platform::{MachineId, Platform};

/// Whether inter-machine data transfer delays a child's start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommMode {
    #[default]
    IncludeTransfer,
    IgnoreTransfer,
}

impl CommMode {
    pub fn label(self) -> &'static str {
        match self {
            CommMode::IncludeTransfer => "on",
            CommMode::IgnoreTransfer => "off",
        }
    }
}

/// One candidate schedule: `machines[i]` runs `order[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub order: Vec<TaskId>,
    pub machines: Vec<MachineId>,
    pub fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(order: Vec<TaskId>, machines: Vec<MachineId>) -> Self {
        debug_assert_eq!(order.len(), machines.len());
        Chromosome {
            order,
            machines,
            fitness: None,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Fitness, or +inf when not yet evaluated.
    pub fn fitness_or_inf(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }

    /// Machine hosting each task, indexed by task.
    pub fn assignment(&self) -> Vec<MachineId> {
        let mut out = vec![MachineId(0); self.order.len()];
        for (&t, &m) in self.order.iter().zip(&self.machines) {
            out[t.0] = m;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Timeline {
    /// Indexed by [`TaskId`].
    pub start: Vec<f64>,
    pub finish: Vec<f64>,
    pub machine: Vec<MachineId>,
    pub makespan: f64,
}

/// Replays `c` and returns its timeline without touching `c`.
pub fn simulate(g: &TaskGraph, p: &Platform, c: &Chromosome, mode: CommMode) -> Result<Timeline> {
    let n = g.len();
    if c.order.len() != n || c.machines.len() != n {
        return Err(Error::InvalidOrder(format!(
            "chromosome has {} tasks and {} machines, graph has {} tasks",
            c.order.len(),
            c.machines.len(),
            n
        )));
    }
    p.check_compatible(g)?;

    let mut start = vec![0.0; n];
    let mut finish = vec![0.0; n];
    let mut machine = vec![MachineId(0); n];
    let mut done = vec![false; n];
    let mut available = vec![0.0f64; p.len()];

    for (&t, &m) in c.order.iter().zip(&c.machines) {
        if t.0 >= n {
            return Err(Error::InvalidOrder(format!("unknown task {t}")));
        }
        if done[t.0] {
            return Err(Error::InvalidOrder(format!(
                "task `{}` appears twice",
                g.task(t).key
            )));
        }
        if m.0 >= p.len() {
            return Err(Error::UnknownMachine(format!("#{}", m.0)));
        }
        let mut ready = 0.0f64;
        for (q, bytes) in g.parents(t) {
            if !done[q.0] {
                return Err(Error::InvalidOrder(format!(
                    "parent `{}` is placed after child `{}`",
                    g.task(q).key,
                    g.task(t).key
                )));
            }
            let arrive = match mode {
                CommMode::IncludeTransfer => {
                    finish[q.0] + p.transfer_time(bytes, machine[q.0], m)?
                }
                CommMode::IgnoreTransfer => finish[q.0],
            };
            ready = ready.max(arrive);
        }
        let s = ready.max(available[m.0]);
        let f = s + p.exec_unchecked(g.task(t), m);
        start[t.0] = s;
        finish[t.0] = f;
        machine[t.0] = m;
        available[m.0] = f;
        done[t.0] = true;
    }

    let makespan = finish.iter().copied().fold(0.0, f64::max);
    Ok(Timeline {
        start,
        finish,
        machine,
        makespan,
    })
}

/// Replays `c`, stamps its fitness with the makespan and returns the timeline.
pub fn evaluate(
    g: &TaskGraph,
    p: &Platform,
    c: &mut Chromosome,
    mode: CommMode,
) -> Result<Timeline> {
    let tl = simulate(g, p, c, mode)?;
    c.fitness = Some(tl.makespan);
    Ok(tl)
}

/// Longest entry-to-exit path using each task's fastest execution time and
/// no communication. No schedule can finish earlier.
pub fn lower_bound(g: &TaskGraph, p: &Platform) -> f64 {
    let mut best = vec![0.0f64; g.len()];
    for &t in g.topological_order() {
        let fastest = p
            .ids()
            .map(|m| p.exec_unchecked(g.task(t), m))
            .fold(f64::INFINITY, f64::min);
        let before = g.parents(t).map(|(q, _)| best[q.0]).fold(0.0, f64::max);
        best[t.0] = before + fastest;
    }
    best.into_iter().fold(0.0, f64::max)
}
