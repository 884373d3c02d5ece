//! Scheduling of dependent tasks on heterogeneous machines.
//!
//! Workflows are DAGs of tasks with compute work and per-edge data volumes
//! ([`dag`]). Machines have speeds and are joined by links with bandwidth
//! and latency ([`platform`]). A schedule is a [`Chromosome`]: a
//! dependency-respecting task order plus one machine per position, replayed
//! by [`evaluator::simulate`] to get start/finish times and the makespan.
//!
//! Two schedulers are provided: a height-based genetic algorithm ([`ga`])
//! and the min-min list heuristic ([`minmin`]).
//!
//! ```
//! use dagsched::fixtures::reference_graph;
//! use dagsched::{ga, minmin, CommMode, GaConfig, Link, Platform};
//!
//! let g = reference_graph();
//! let p = Platform::uniform(&[1.0, 2.0], Link::new(4.0, 0.0)).unwrap();
//! let cfg = GaConfig { rng_seed: 7, ..GaConfig::default() };
//! let run = ga::run(&g, &p, &cfg, CommMode::IncludeTransfer).unwrap();
//! let (_, baseline) = minmin::min_min_schedule(&g, &p, CommMode::IncludeTransfer).unwrap();
//! assert!(run.timeline.makespan > 0.0 && baseline.makespan > 0.0);
//! ```

// `!(x > 0.0)` is used deliberately so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod dag;
pub mod dagio;
mod error;
pub mod evaluator;
pub mod fixtures;
pub mod ga;
pub mod minmin;
pub mod platform;

pub use dag::{build_graph, EdgeDecl, HeightMap, TaskDecl, TaskGraph, TaskId};
pub use error::{Error, Result};
pub use evaluator::{evaluate, lower_bound, simulate, Chromosome, CommMode, Timeline};
pub use ga::{CrossoverMode, GaConfig, RunStats};
pub use platform::{Link, LinkSpec, MachineDecl, MachineId, Platform};
