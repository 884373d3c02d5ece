use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dag::{build_graph, EdgeDecl, TaskDecl, TaskGraph};
use crate::error::{Error, Result};
use crate::platform::{Link, MachineDecl, Platform};

/// Shape of a generated layered DAG.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_tasks: usize,
    /// Most tasks any layer may hold.
    pub width: usize,
    /// Mean transfer time over mean execution time.
    pub ccr: f64,
    pub work_range: (f64, f64),
    /// Bandwidth the `ccr` calibration assumes (speed-1 machines).
    pub bandwidth: f64,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            n_tasks: 10,
            width: 3,
            ccr: 0.5,
            work_range: (5.0, 25.0),
            bandwidth: 1.0,
            seed: 0,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InfeasibleSpec(m));
        if self.n_tasks < 1 {
            return fail("n_tasks must be at least 1".into());
        }
        if self.width < 1 {
            return fail("width must be at least 1".into());
        }
        if !(self.ccr >= 0.0) || !self.ccr.is_finite() {
            return fail(format!("ccr must be non-negative, got {}", self.ccr));
        }
        let (lo, hi) = self.work_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return fail(format!("work range [{lo}, {hi}] must satisfy 0 < lo <= hi"));
        }
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return fail(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            ));
        }
        Ok(())
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Generates a seeded layered DAG with one entry and one exit task.
///
/// The middle tasks form layers of at most `width` tasks; each draws one to
/// three parents from the layer just above. The exit task depends on every
/// task that would otherwise have no child. Edge volumes are scaled so the
/// mean transfer time at `bandwidth` is `ccr` times the mean work.
///
/// Returns the graph and the layer index of every task.
pub fn generate_random_dag(spec: &GenSpec) -> Result<(TaskGraph, Vec<usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_tasks;
    let (lo, hi) = spec.work_range;

    let mut layer_of = vec![0usize; n];
    let mut links: Vec<(usize, usize)> = Vec::new();
    if n >= 2 {
        let mut prev: Vec<usize> = vec![0];
        let mut next_id = 1;
        let mut layer = 1;
        while next_id < n - 1 {
            let size = rng.random_range(1..=spec.width.min(n - 1 - next_id));
            let current: Vec<usize> = (next_id..next_id + size).collect();
            for &t in &current {
                layer_of[t] = layer;
                let k = rng.random_range(1..=3usize).min(prev.len());
                let mut picked: Vec<usize> = sample(&mut rng, prev.len(), k)
                    .into_iter()
                    .map(|i| prev[i])
                    .collect();
                picked.sort_unstable();
                links.extend(picked.into_iter().map(|p| (p, t)));
            }
            next_id += size;
            prev = current;
            layer += 1;
        }
        let exit = n - 1;
        layer_of[exit] = layer;
        let mut has_child = vec![false; n];
        for &(p, _) in &links {
            has_child[p] = true;
        }
        links.extend((0..exit).filter(|&t| !has_child[t]).map(|t| (t, exit)));
    }

    let works: Vec<f64> = (0..n).map(|_| round3(rng.random_range(lo..=hi))).collect();
    let factors: Vec<f64> = links.iter().map(|_| rng.random_range(0.5..1.5)).collect();
    let mean_work = works.iter().sum::<f64>() / n as f64;
    let mean_factor = if factors.is_empty() {
        1.0
    } else {
        factors.iter().sum::<f64>() / factors.len() as f64
    };
    let target = spec.ccr * mean_work * spec.bandwidth;

    let tasks = works
        .iter()
        .enumerate()
        .map(|(i, &w)| TaskDecl::new(format!("t{}", i + 1), format!("job{}", i + 1), w))
        .collect();
    let edges = links
        .iter()
        .zip(&factors)
        .map(|(&(s, d), &f)| {
            EdgeDecl::new(
                format!("t{}", s + 1),
                format!("t{}", d + 1),
                round3(f / mean_factor * target),
            )
        })
        .collect();
    Ok((build_graph(tasks, edges)?, layer_of))
}

/// Speeds drawn uniformly from `speed_range`; every pair of machines joined
/// by one default link.
pub fn generate_platform(
    n_machines: usize,
    speed_range: (f64, f64),
    link: Link,
    seed: u64,
) -> Result<Platform> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (lo, hi) = speed_range;
    if !(lo > 0.0 && lo <= hi) {
        return Err(Error::InfeasibleSpec(format!(
            "speed range [{lo}, {hi}] must satisfy 0 < lo <= hi"
        )));
    }
    let machines = (0..n_machines)
        .map(|i| {
            let speed = (rng.random_range(lo..=hi) * 100.0).round() / 100.0;
            MachineDecl::new(
                format!("m{}", i + 1),
                format!("Machine{}", i + 1),
                speed.max(0.01),
            )
        })
        .collect();
    Platform::new(machines, Some(link), Vec::new(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dagio::document::dag_to_json;

    fn spec(n: usize, width: usize, seed: u64) -> GenSpec {
        GenSpec {
            n_tasks: n,
            width,
            seed,
            ..GenSpec::default()
        }
    }

    #[test]
    fn ten_tasks_width_three() {
        for seed in 0..50 {
            let (g, layers) = generate_random_dag(&spec(10, 3, seed)).unwrap();
            assert_eq!(g.len(), 10);
            let max_layer = *layers.iter().max().unwrap();
            for l in 0..=max_layer {
                let size = layers.iter().filter(|&&x| x == l).count();
                assert!((1..=3).contains(&size));
            }
            assert_eq!(g.entries().len(), 1);
            assert_eq!(g.exits().len(), 1);
            for e in g.edges() {
                assert!(layers[e.src.0] < layers[e.dst.0]);
            }
        }
    }

    #[test]
    fn degenerate_sizes() {
        let (g, _) = generate_random_dag(&spec(1, 3, 0)).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.edges().is_empty());
        let (g, _) = generate_random_dag(&spec(2, 1, 0)).unwrap();
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn zero_ccr_means_no_data() {
        let s = GenSpec {
            ccr: 0.0,
            ..spec(25, 10, 3)
        };
        let (g, _) = generate_random_dag(&s).unwrap();
        assert!(g.edges().iter().all(|e| e.bytes == 0.0));
    }

    #[test]
    fn ccr_is_calibrated() {
        let s = GenSpec {
            ccr: 2.0,
            bandwidth: 4.0,
            ..spec(45, 7, 9)
        };
        let (g, _) = generate_random_dag(&s).unwrap();
        let mean_work = g.tasks().iter().map(|t| t.work).sum::<f64>() / g.len() as f64;
        let mean_transfer =
            g.edges().iter().map(|e| e.bytes / 4.0).sum::<f64>() / g.edges().len() as f64;
        assert!((mean_transfer / mean_work - 2.0).abs() < 1e-3);
    }

    #[test]
    fn deterministic_documents() {
        let a = dag_to_json(&generate_random_dag(&spec(25, 10, 3)).unwrap().0);
        let b = dag_to_json(&generate_random_dag(&spec(25, 10, 3)).unwrap().0);
        assert_eq!(a, b);
        let c = dag_to_json(&generate_random_dag(&spec(25, 10, 4)).unwrap().0);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            generate_random_dag(&spec(0, 3, 0)),
            Err(Error::InfeasibleSpec(_))
        ));
        assert!(generate_random_dag(&spec(5, 0, 0)).is_err());
        assert!(generate_random_dag(&GenSpec {
            work_range: (3.0, 1.0),
            ..GenSpec::default()
        })
        .is_err());
        assert!(generate_random_dag(&GenSpec {
            ccr: -1.0,
            ..GenSpec::default()
        })
        .is_err());
    }

    #[test]
    fn platform_generation() {
        let p = generate_platform(7, (1.0, 4.0), Link::new(1.0, 0.0), 5).unwrap();
        assert_eq!(p.len(), 7);
        assert!(p.machines().iter().all(|m| (1.0..=4.0).contains(&m.speed)));
        assert_eq!(
            p,
            generate_platform(7, (1.0, 4.0), Link::new(1.0, 0.0), 5).unwrap()
        );
    }
}
