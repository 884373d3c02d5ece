//! Independent oracles: brute-force enumeration and a separately written
//! schedule replay. Nothing here calls into the scheduler internals beyond
//! reading graph and platform data.

#![allow(dead_code)]

use dagsched::{
    build_graph, Chromosome, EdgeDecl, Link, MachineDecl, MachineId, Platform, TaskDecl, TaskGraph,
    TaskId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random DAG over `n` tasks: edge i -> j (i < j) with probability `p`.
/// Task keys are shuffled against declaration order so index order is not
/// a topological order.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> TaskGraph {
    let mut rank: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        rank.swap(i, rng.random_range(0..=i));
    }
    let tasks = (0..n)
        .map(|i| {
            TaskDecl::new(
                format!("k{i}"),
                format!("job{i}"),
                rng.random_range(1.0..20.0),
            )
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rank[a] < rank[b] && rng.random_bool(p) {
                edges.push(EdgeDecl::new(
                    format!("k{a}"),
                    format!("k{b}"),
                    rng.random_range(0.0..30.0),
                ));
            }
        }
    }
    build_graph(tasks, edges).unwrap()
}

/// Heterogeneous platform with random speeds, a random default link and a
/// few random explicit links.
pub fn random_platform(m: usize, rng: &mut impl Rng) -> Platform {
    let machines = (0..m)
        .map(|i| {
            MachineDecl::new(
                format!("m{i}"),
                format!("Machine{i}"),
                rng.random_range(0.5..3.0),
            )
        })
        .collect();
    let mut links = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a != b && rng.random_bool(0.3) {
                links.push(dagsched::LinkSpec {
                    src: format!("m{a}"),
                    dst: format!("m{b}"),
                    bandwidth: rng.random_range(1.0..10.0),
                    latency: rng.random_range(0.0..1.0),
                });
            }
        }
    }
    let default = Link::new(rng.random_range(1.0..10.0), rng.random_range(0.0..0.5));
    Platform::new(machines, Some(default), links, None).unwrap()
}

pub fn small_instance(seed: u64, max_tasks: usize, max_machines: usize) -> (TaskGraph, Platform) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_tasks);
    let m = rng.random_range(1..=max_machines);
    let p = rng.random_range(0.1..0.6);
    (random_graph(n, p, &mut rng), random_platform(m, &mut rng))
}

/// Every topological order, by recursive enumeration.
pub fn all_orders(g: &TaskGraph) -> Vec<Vec<TaskId>> {
    fn go(
        g: &TaskGraph,
        placed: &mut Vec<bool>,
        cur: &mut Vec<TaskId>,
        out: &mut Vec<Vec<TaskId>>,
    ) {
        if cur.len() == g.len() {
            out.push(cur.clone());
            return;
        }
        for t in g.ids() {
            if !placed[t.0] && g.parents(t).all(|(q, _)| placed[q.0]) {
                placed[t.0] = true;
                cur.push(t);
                go(g, placed, cur, out);
                cur.pop();
                placed[t.0] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(g, &mut vec![false; g.len()], &mut Vec::new(), &mut out);
    out
}

/// Every machine assignment vector of length `n` over `m` machines.
pub fn all_assignments(n: usize, m: usize) -> Vec<Vec<MachineId>> {
    let total = m.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let r = code % m;
                    code /= m;
                    MachineId(r)
                })
                .collect()
        })
        .collect()
}

/// Replay written from the model definition: returns (start, finish) per
/// task index, or None if a parent has not finished when its child comes up.
pub fn replay(
    g: &TaskGraph,
    p: &Platform,
    order: &[TaskId],
    machines: &[MachineId],
    with_transfer: bool,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = g.len();
    let mut start = vec![f64::NAN; n];
    let mut finish = vec![f64::NAN; n];
    let mut host = vec![usize::MAX; n];
    let mut free_at = vec![0.0f64; p.len()];
    for (&t, &m) in order.iter().zip(machines) {
        let task = g.task(t);
        let mut earliest = 0.0f64;
        for e in g.edges().iter().filter(|e| e.dst == t) {
            if finish[e.src.0].is_nan() {
                return None;
            }
            let mut arrive = finish[e.src.0];
            if with_transfer && host[e.src.0] != m.0 {
                let link = p.link(MachineId(host[e.src.0]), m).unwrap();
                arrive += link.latency + e.bytes / link.bandwidth;
            }
            earliest = earliest.max(arrive);
        }
        let exec = match p.etc() {
            Some(rows) => rows[t.0][m.0],
            None => task.work / p.machine(m).speed,
        };
        let s = earliest.max(free_at[m.0]);
        start[t.0] = s;
        finish[t.0] = s + exec;
        host[t.0] = m.0;
        free_at[m.0] = s + exec;
    }
    Some((start, finish))
}

pub fn replay_makespan(
    g: &TaskGraph,
    p: &Platform,
    order: &[TaskId],
    machines: &[MachineId],
    with_transfer: bool,
) -> Option<f64> {
    replay(g, p, order, machines, with_transfer).map(|(_, f)| f.into_iter().fold(0.0, f64::max))
}

/// Minimum makespan over all valid orders and assignments.
pub fn brute_force_optimum(g: &TaskGraph, p: &Platform, with_transfer: bool) -> f64 {
    let orders = all_orders(g);
    let assigns = all_assignments(g.len(), p.len());
    let mut best = f64::INFINITY;
    for o in &orders {
        for a in &assigns {
            best = best.min(replay_makespan(g, p, o, a, with_transfer).unwrap());
        }
    }
    best
}

/// Every root-to-exit path, by DFS.
pub fn all_paths(g: &TaskGraph) -> Vec<Vec<TaskId>> {
    fn go(g: &TaskGraph, t: TaskId, cur: &mut Vec<TaskId>, out: &mut Vec<Vec<TaskId>>) {
        cur.push(t);
        let kids: Vec<TaskId> = g.children(t).map(|(c, _)| c).collect();
        if kids.is_empty() {
            out.push(cur.clone());
        }
        for c in kids {
            go(g, c, cur, out);
        }
        cur.pop();
    }
    let mut out = Vec::new();
    for t in g.ids().filter(|&t| g.parent_count(t) == 0) {
        go(g, t, &mut Vec::new(), &mut out);
    }
    out
}

/// Reachability by plain DFS over child lists.
pub fn reachable(g: &TaskGraph, a: TaskId, b: TaskId) -> bool {
    let mut stack: Vec<TaskId> = g.children(a).map(|(c, _)| c).collect();
    let mut seen = vec![false; g.len()];
    while let Some(t) = stack.pop() {
        if t == b {
            return true;
        }
        if !seen[t.0] {
            seen[t.0] = true;
            stack.extend(g.children(t).map(|(c, _)| c));
        }
    }
    false
}

pub fn chromosome_ok(g: &TaskGraph, c: &Chromosome) -> bool {
    dagsched::dag::is_valid_order(g, &c.order)
}
