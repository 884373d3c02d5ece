//! Task graph model: validated DAG construction, heights, readiness and
//! dependency queries.
//!
//! Tasks are addressed by [`TaskId`], a dense index in declaration order.
//! The textual key each task was declared with is kept for documents and
//! diagnostics.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaskId(pub usize);

impl TaskId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A task as declared by the caller, before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDecl {
    pub id: String,
    pub name: String,
    pub work: f64,
}

impl TaskDecl {
    pub fn new(id: impl Into<String>, name: impl Into<String>, work: f64) -> Self {
        TaskDecl {
            id: id.into(),
            name: name.into(),
            work,
        }
    }
}

/// A data dependency as declared by the caller, endpoints given by task key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDecl {
    pub src: String,
    pub dst: String,
    pub bytes: f64,
}

impl EdgeDecl {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, bytes: f64) -> Self {
        EdgeDecl {
            src: src.into(),
            dst: dst.into(),
            bytes,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskNode {
    pub id: TaskId,
    pub key: String,
    pub name: String,
    pub work: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataEdge {
    pub src: TaskId,
    pub dst: TaskId,
    pub bytes: f64,
}

/// An immutable, validated DAG of tasks.
#[derive(Clone, Debug)]
pub struct TaskGraph {
    tasks: Vec<TaskNode>,
    edges: Vec<DataEdge>,
    by_key: HashMap<String, TaskId>,
    // (parent, index into `edges`) in declaration order
    parents: Vec<Vec<(TaskId, usize)>>,
    children: Vec<Vec<(TaskId, usize)>>,
    topo: Vec<TaskId>,
    // descendants[a] bitset: bit b set iff a path a -> ... -> b exists
    descendants: Vec<Vec<u64>>,
}

impl PartialEq for TaskGraph {
    fn eq(&self, other: &Self) -> bool {
        self.tasks == other.tasks && self.edges == other.edges
    }
}

/// Validates tasks and edges and builds the graph.
pub fn build_graph(tasks: Vec<TaskDecl>, edges: Vec<EdgeDecl>) -> Result<TaskGraph> {
    if tasks.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut by_key = HashMap::with_capacity(tasks.len());
    let mut nodes = Vec::with_capacity(tasks.len());
    for (i, t) in tasks.into_iter().enumerate() {
        if !(t.work >= 0.0 && t.work.is_finite()) {
            return Err(Error::InvalidWork {
                task: t.id,
                work: t.work,
            });
        }
        if by_key.insert(t.id.clone(), TaskId(i)).is_some() {
            return Err(Error::DuplicateTaskId(t.id));
        }
        nodes.push(TaskNode {
            id: TaskId(i),
            key: t.id,
            name: t.name,
            work: t.work,
        });
    }

    let n = nodes.len();
    let mut parents = vec![Vec::new(); n];
    let mut children = vec![Vec::new(); n];
    let mut data_edges = Vec::with_capacity(edges.len());
    let mut seen = std::collections::HashSet::with_capacity(edges.len());
    for e in edges {
        let lookup = |k: &str| {
            by_key
                .get(k)
                .copied()
                .ok_or_else(|| Error::UnknownEdgeEndpoint {
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                    missing: k.to_string(),
                })
        };
        let src = lookup(&e.src)?;
        let dst = lookup(&e.dst)?;
        if src == dst {
            return Err(Error::SelfLoop(e.src));
        }
        if !(e.bytes >= 0.0 && e.bytes.is_finite()) {
            return Err(Error::InvalidBytes {
                src: e.src,
                dst: e.dst,
                bytes: e.bytes,
            });
        }
        if !seen.insert((src, dst)) {
            return Err(Error::DuplicateEdge(e.src, e.dst));
        }
        let idx = data_edges.len();
        data_edges.push(DataEdge {
            src,
            dst,
            bytes: e.bytes,
        });
        parents[dst.0].push((src, idx));
        children[src.0].push((dst, idx));
    }

    let topo = match topological_order(&parents, &children) {
        Some(order) => order,
        None => {
            let cycle = find_cycle(&children);
            return Err(Error::CycleDetected(
                cycle.into_iter().map(|t| nodes[t.0].key.clone()).collect(),
            ));
        }
    };

    let words = n.div_ceil(64);
    let mut descendants = vec![vec![0u64; words]; n];
    for &t in topo.iter().rev() {
        let mut bits = vec![0u64; words];
        for &(c, _) in &children[t.0] {
            bits[c.0 / 64] |= 1 << (c.0 % 64);
            for (w, cw) in bits.iter_mut().zip(&descendants[c.0]) {
                *w |= *cw;
            }
        }
        descendants[t.0] = bits;
    }

    Ok(TaskGraph {
        tasks: nodes,
        edges: data_edges,
        by_key,
        parents,
        children,
        topo,
        descendants,
    })
}

// Kahn's algorithm; among ready tasks the smallest declaration index goes first.
fn topological_order(
    parents: &[Vec<(TaskId, usize)>],
    children: &[Vec<(TaskId, usize)>],
) -> Option<Vec<TaskId>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut heap: BinaryHeap<Reverse<usize>> = indegree
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(i, _)| Reverse(i))
        .collect();
    let mut order = Vec::with_capacity(parents.len());
    while let Some(Reverse(t)) = heap.pop() {
        order.push(TaskId(t));
        for &(c, _) in &children[t] {
            indegree[c.0] -= 1;
            if indegree[c.0] == 0 {
                heap.push(Reverse(c.0));
            }
        }
    }
    (order.len() == parents.len()).then_some(order)
}

fn find_cycle(children: &[Vec<(TaskId, usize)>]) -> Vec<TaskId> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = children.len();
    let mut mark = vec![Mark::New; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        mark[root] = Mark::Open;
        stack.push((root, 0));
        while let Some(top) = stack.last_mut() {
            let (t, next) = *top;
            top.1 += 1;
            if let Some(&(c, _)) = children[t].get(next) {
                match mark[c.0] {
                    Mark::New => {
                        mark[c.0] = Mark::Open;
                        stack.push((c.0, 0));
                    }
                    Mark::Open => {
                        let pos = stack.iter().position(|&(s, _)| s == c.0).unwrap();
                        return stack[pos..].iter().map(|&(s, _)| TaskId(s)).collect();
                    }
                    Mark::Done => {}
                }
            } else {
                mark[t] = Mark::Done;
                stack.pop();
            }
        }
    }
    Vec::new()
}

impl TaskGraph {
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn tasks(&self) -> &[TaskNode] {
        &self.tasks
    }

    pub fn edges(&self) -> &[DataEdge] {
        &self.edges
    }

    pub fn task(&self, id: TaskId) -> &TaskNode {
        &self.tasks[id.0]
    }

    pub fn task_id(&self, key: &str) -> Option<TaskId> {
        self.by_key.get(key).copied()
    }

    pub fn ids(&self) -> impl ExactSizeIterator<Item = TaskId> + '_ {
        (0..self.tasks.len()).map(TaskId)
    }

    /// Parents of `t` with the data volume each one sends to `t`.
    pub fn parents(&self, t: TaskId) -> impl Iterator<Item = (TaskId, f64)> + '_ {
        self.parents[t.0]
            .iter()
            .map(move |&(p, e)| (p, self.edges[e].bytes))
    }

    pub fn children(&self, t: TaskId) -> impl Iterator<Item = (TaskId, f64)> + '_ {
        self.children[t.0]
            .iter()
            .map(move |&(c, e)| (c, self.edges[e].bytes))
    }

    pub fn parent_count(&self, t: TaskId) -> usize {
        self.parents[t.0].len()
    }

    pub fn entries(&self) -> Vec<TaskId> {
        self.ids()
            .filter(|t| self.parents[t.0].is_empty())
            .collect()
    }

    pub fn exits(&self) -> Vec<TaskId> {
        self.ids()
            .filter(|t| self.children[t.0].is_empty())
            .collect()
    }

    /// A fixed topological order (ties by declaration order).
    pub fn topological_order(&self) -> &[TaskId] {
        &self.topo
    }

    pub fn is_ancestor(&self, a: TaskId, b: TaskId) -> bool {
        self.descendants[a.0][b.0 / 64] & (1 << (b.0 % 64)) != 0
    }

    pub fn compute_heights(&self) -> HeightMap {
        compute_heights(self)
    }

    pub fn is_valid_order(&self, order: &[TaskId]) -> bool {
        is_valid_order(self, order)
    }
}

/// Height of every task, indexed by [`TaskId`]. A height of 0 marks a task
/// already taken during order generation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightMap(Vec<u32>);

impl HeightMap {
    pub fn get(&self, t: TaskId) -> u32 {
        self.0[t.0]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// True once every task has been selected.
    pub fn exhausted(&self) -> bool {
        self.0.iter().all(|&h| h == 0)
    }
}

/// Height 1 for entry tasks, otherwise one more than the tallest parent.
pub fn compute_heights(g: &TaskGraph) -> HeightMap {
    let mut h = vec![0u32; g.len()];
    for &t in g.topological_order() {
        h[t.0] = 1 + g.parents[t.0]
            .iter()
            .map(|&(p, _)| h[p.0])
            .max()
            .unwrap_or(0);
    }
    HeightMap(h)
}

/// Marks `selected` as taken (height 0) and recomputes every other untaken
/// task against the updated values. Returns a new map; `h` is untouched.
pub fn adjust_heights(g: &TaskGraph, h: &HeightMap, selected: TaskId) -> Result<HeightMap> {
    if h.get(selected) != 1 {
        return Err(Error::NotReady(g.task(selected).key.clone()));
    }
    let mut out = h.0.clone();
    out[selected.0] = 0;
    for &t in g.topological_order() {
        if out[t.0] == 0 {
            continue;
        }
        out[t.0] = 1 + g.parents[t.0]
            .iter()
            .map(|&(p, _)| out[p.0])
            .max()
            .unwrap_or(0);
    }
    Ok(HeightMap(out))
}

/// Tasks whose current height is exactly 1, in declaration order.
pub fn ready_tasks(g: &TaskGraph, h: &HeightMap) -> Vec<TaskId> {
    g.ids().filter(|&t| h.get(t) == 1).collect()
}

pub fn is_ancestor(g: &TaskGraph, a: TaskId, b: TaskId) -> bool {
    g.is_ancestor(a, b)
}

/// True iff `order` is a permutation of all tasks in which every parent
/// precedes each of its children.
pub fn is_valid_order(g: &TaskGraph, order: &[TaskId]) -> bool {
    if order.len() != g.len() {
        return false;
    }
    let mut pos = vec![usize::MAX; g.len()];
    for (i, &t) in order.iter().enumerate() {
        if t.0 >= g.len() || pos[t.0] != usize::MAX {
            return false;
        }
        pos[t.0] = i;
    }
    g.edges.iter().all(|e| pos[e.src.0] < pos[e.dst.0])
}
