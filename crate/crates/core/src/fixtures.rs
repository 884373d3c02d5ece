//! The ten-task reference workflow used in examples, tests and docs.

use crate::dag::{build_graph, EdgeDecl, TaskDecl, TaskGraph};

/// Work of tasks 1..=10; on a speed-1 machine these are the execution times.
pub const REFERENCE_WORK: [f64; 10] = [21.0, 12.0, 18.0, 12.0, 9.0, 21.0, 15.0, 24.0, 11.0, 10.0];

/// Edges of the reference workflow as (src, dst, bytes), 1-based task numbers.
pub const REFERENCE_EDGES: [(usize, usize, f64); 11] = [
    (1, 2, 10.0),
    (1, 3, 20.0),
    (1, 4, 15.0),
    (3, 6, 12.0),
    (4, 8, 8.0),
    (2, 5, 16.0),
    (6, 5, 6.0),
    (8, 7, 14.0),
    (5, 9, 10.0),
    (7, 9, 9.0),
    (9, 10, 5.0),
];

/// Tasks `t1..t10` named `job1..job10`.
pub fn reference_decls() -> (Vec<TaskDecl>, Vec<EdgeDecl>) {
    let tasks = REFERENCE_WORK
        .iter()
        .enumerate()
        .map(|(i, &w)| TaskDecl::new(format!("t{}", i + 1), format!("job{}", i + 1), w))
        .collect();
    let edges = REFERENCE_EDGES
        .iter()
        .map(|&(s, d, b)| EdgeDecl::new(format!("t{s}"), format!("t{d}"), b))
        .collect();
    (tasks, edges)
}

pub fn reference_graph() -> TaskGraph {
    let (tasks, edges) = reference_decls();
    build_graph(tasks, edges).expect("reference graph is valid")
}
