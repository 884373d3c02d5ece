//! GA versus min-min over a grid of generated instances.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dagio::{generate_platform, generate_random_dag, BenchRow, GenSpec};
use crate::error::{Error, Result};
use crate::evaluator::{lower_bound, CommMode};
use crate::ga::{self, GaConfig};
use crate::minmin::min_min_schedule;
use crate::platform::Link;

/// Instance shape: task count, machine count, layer width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub n_tasks: usize,
    pub n_machines: usize,
    pub width: usize,
}

pub const DEFAULT_WIDTH: usize = 3;

impl FromStr for Shape {
    type Err = Error;

    /// `TASKSxMACHINES` or `TASKSxMACHINES:WIDTH`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("bad shape `{s}`, expected e.g. 10x2 or 10x2:3"));
        let (dims, width) = match s.split_once(':') {
            Some((d, w)) => (d, w.trim().parse().map_err(|_| bad())?),
            None => (s, DEFAULT_WIDTH),
        };
        let (t, m) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
        let shape = Shape {
            n_tasks: t.trim().parse().map_err(|_| bad())?,
            n_machines: m.trim().parse().map_err(|_| bad())?,
            width,
        };
        if shape.n_tasks == 0 || shape.n_machines == 0 || shape.width == 0 {
            return Err(bad());
        }
        Ok(shape)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}:{}", self.n_tasks, self.n_machines, self.width)
    }
}

/// The nine task/machine combinations of the reference comparison, with
/// their widths ("parallel tasks"); width 0 there is read as 1.
pub fn default_shapes() -> Vec<Shape> {
    [
        (10, 2, 3),
        (10, 7, 3),
        (25, 2, 10),
        (25, 7, 10),
        (45, 2, 7),
        (45, 7, 7),
        (2, 90, 1),
        (10, 90, 3),
        (40, 90, 10),
    ]
    .into_iter()
    .map(|(n_tasks, n_machines, width)| Shape {
        n_tasks,
        n_machines,
        width,
    })
    .collect()
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub shapes: Vec<Shape>,
    pub seeds: u64,
    pub base_seed: u64,
    pub ccr: f64,
    pub work_range: (f64, f64),
    pub speed_range: (f64, f64),
    pub link: Link,
    pub comm: CommMode,
    /// Template; `rng_seed` is replaced per instance.
    pub ga: GaConfig,
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            shapes: default_shapes(),
            seeds: 20,
            base_seed: 0,
            ccr: 0.5,
            work_range: (5.0, 25.0),
            speed_range: (1.0, 2.0),
            link: Link::new(1.0, 0.0),
            comm: CommMode::IncludeTransfer,
            ga: GaConfig::default(),
            timing: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub row: BenchRow,
    /// Makespan of the load-balanced seed individual.
    pub seed_makespan: f64,
    pub best_per_generation: Vec<f64>,
}

pub fn run_instance(cfg: &BenchConfig, shape: Shape, seed: u64) -> Result<BenchOutcome> {
    let spec = GenSpec {
        n_tasks: shape.n_tasks,
        width: shape.width,
        ccr: cfg.ccr,
        work_range: cfg.work_range,
        bandwidth: cfg.link.bandwidth,
        seed,
    };
    let (g, _) = generate_random_dag(&spec)?;
    let p = generate_platform(shape.n_machines, cfg.speed_range, cfg.link, seed)?;
    let ga_cfg = GaConfig {
        rng_seed: seed,
        ..cfg.ga.clone()
    };
    let result = ga::run(&g, &p, &ga_cfg, cfg.comm)?;
    let (_, mm) = min_min_schedule(&g, &p, cfg.comm)?;
    Ok(BenchOutcome {
        row: BenchRow {
            instance: format!(
                "t{}m{}w{}s{}",
                shape.n_tasks, shape.n_machines, shape.width, seed
            ),
            n_tasks: shape.n_tasks,
            n_machines: shape.n_machines,
            width: shape.width,
            ccr: cfg.ccr,
            comm_mode: cfg.comm,
            seed,
            ga_makespan: result.timeline.makespan,
            minmin_makespan: mm.makespan,
            lower_bound: lower_bound(&g, &p),
            ga_runtime_ms: cfg.timing.then_some(result.stats.wall_time.as_millis()),
        },
        seed_makespan: result.stats.seed_makespan.unwrap_or(f64::INFINITY),
        best_per_generation: result.stats.best_per_generation,
    })
}

/// Runs every (shape, seed) instance, in parallel, returning results in grid
/// order: shapes outer, seeds inner.
pub fn run_bench(cfg: &BenchConfig) -> Vec<Result<BenchOutcome>> {
    let grid: Vec<(Shape, u64)> = cfg
        .shapes
        .iter()
        .flat_map(|&s| (0..cfg.seeds).map(move |i| (s, cfg.base_seed + i)))
        .collect();
    grid.par_iter()
        .map(|&(shape, seed)| run_instance(cfg, shape, seed))
        .collect()
}

/// Fraction of rows where the GA is no worse than min-min.
pub fn ga_win_fraction(rows: &[BenchRow]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let wins = rows
        .iter()
        .filter(|r| r.ga_makespan <= r.minmin_makespan + 1e-9)
        .count();
    wins as f64 / rows.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_parsing() {
        assert_eq!(
            "10x2".parse::<Shape>().unwrap(),
            Shape {
                n_tasks: 10,
                n_machines: 2,
                width: 3
            }
        );
        assert_eq!("40x90:10".parse::<Shape>().unwrap().width, 10);
        assert!("10".parse::<Shape>().is_err());
        assert!("0x2".parse::<Shape>().is_err());
        assert!("10x2:z".parse::<Shape>().is_err());
    }

    #[test]
    fn default_grid_size() {
        let cfg = BenchConfig::default();
        assert_eq!(cfg.shapes.len() as u64 * cfg.seeds, 180);
    }

    #[test]
    fn one_instance() {
        let cfg = BenchConfig {
            shapes: vec!["10x2".parse().unwrap()],
            seeds: 1,
            ..BenchConfig::default()
        };
        let out = run_bench(&cfg);
        assert_eq!(out.len(), 1);
        let o = out.into_iter().next().unwrap().unwrap();
        assert!(o.row.ga_makespan >= o.row.lower_bound - 1e-9);
        assert!(o.row.ga_makespan <= o.seed_makespan);
        assert_eq!(o.row.ga_runtime_ms, None);
    }

    #[test]
    fn win_fraction() {
        assert_eq!(ga_win_fraction(&[]), 0.0);
    }
}
