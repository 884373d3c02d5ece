//! Height-based genetic algorithm for dependent-task scheduling.
//!
//! Every chromosome the algorithm produces keeps a valid task order:
//! random individuals are built from ready tasks only, both crossovers
//! exchange machines and leave orders alone, and mutation swaps only pairs
//! whose span holds no dependency.

mod operators;
mod population;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dag::{compute_heights, TaskGraph};
use crate::error::{Error, Result};
use crate::evaluator::{evaluate, simulate, Chromosome, CommMode, Timeline};
use crate::platform::Platform;

pub use operators::{crossover_order_preserving, crossover_task_aligned, mutate, swap_is_safe};
pub use population::{
    generate_individual, load_balanced_individual, rank_select_pairs, rank_weights,
    update_population, Population,
};

/// The generator behind every stochastic choice of a run.
pub type GaRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossoverMode {
    /// Position-wise machine swap after the point.
    OrderPreserving,
    /// Machine swap by task identity for tasks after the point.
    TaskAligned,
    /// Alternates the two, starting with order-preserving, pair by pair.
    #[default]
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub pop_size: usize,
    pub max_iters: usize,
    /// Stop after this many generations without improvement of the best.
    pub stagnation_limit: usize,
    pub pairs_per_generation: usize,
    pub crossover_mode: CrossoverMode,
    pub mutation_rate: f64,
    pub heuristic_seed_count: usize,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig::with_pop_size(100)
    }
}

impl GaConfig {
    /// Defaults for a given population size; pairs default to a quarter of it.
    pub fn with_pop_size(pop_size: usize) -> Self {
        GaConfig {
            pop_size,
            max_iters: 50,
            stagnation_limit: 50,
            pairs_per_generation: (pop_size / 4).max(1),
            crossover_mode: CrossoverMode::Mixed,
            mutation_rate: 0.2,
            heuristic_seed_count: 1,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.pop_size < 2 {
            return fail("pop_size must be at least 2");
        }
        if self.pairs_per_generation < 1 {
            return fail("pairs_per_generation must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return fail("mutation_rate must lie in [0, 1]");
        }
        if self.heuristic_seed_count >= self.pop_size {
            return fail("heuristic_seed_count must be below pop_size");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    /// Generations run after the initial population.
    pub iterations: usize,
    /// Best fitness so far at generation 0, 1, ... (non-increasing).
    pub best_per_generation: Vec<f64>,
    /// Makespan of the first load-balanced seed individual, if one was used.
    pub seed_makespan: Option<f64>,
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub best: Chromosome,
    pub timeline: Timeline,
    pub stats: RunStats,
}

fn evaluate_all(
    g: &TaskGraph,
    p: &Platform,
    mode: CommMode,
    members: &mut [Chromosome],
) -> Result<()> {
    members
        .par_iter_mut()
        .try_for_each(|c| evaluate(g, p, c, mode).map(|_| ()))
}

/// Produces the children of one generation, unevaluated. All randomness of
/// a generation is drawn here, in a fixed order.
pub fn breed<R: Rng + ?Sized>(
    g: &TaskGraph,
    pop: &Population,
    cfg: &GaConfig,
    rng: &mut R,
) -> Vec<Chromosome> {
    let n = g.len();
    let pairs = rank_select_pairs(pop, cfg.pairs_per_generation, rng);
    let mut children = Vec::with_capacity(2 * pairs.len());
    for (k, (p1, p2)) in pairs.into_iter().enumerate() {
        let (c1, c2) = if n < 2 {
            (
                Chromosome::new(p1.order.clone(), p1.machines.clone()),
                Chromosome::new(p2.order.clone(), p2.machines.clone()),
            )
        } else {
            let point = rng.random_range(1..n);
            let aligned = match cfg.crossover_mode {
                CrossoverMode::OrderPreserving => false,
                CrossoverMode::TaskAligned => true,
                CrossoverMode::Mixed => k % 2 == 1,
            };
            if aligned {
                crossover_task_aligned(p1, p2, point)
            } else {
                crossover_order_preserving(p1, p2, point)
            }
        };
        for child in [c1, c2] {
            let child = if rng.random_bool(cfg.mutation_rate) {
                mutate(g, &child, rng)
            } else {
                child
            };
            children.push(child);
        }
    }
    children
}

/// Builds and evaluates the initial population: the load-balanced seeds
/// first, then random individuals.
pub fn initial_population<R: Rng + ?Sized>(
    g: &TaskGraph,
    p: &Platform,
    cfg: &GaConfig,
    mode: CommMode,
    rng: &mut R,
) -> Result<Population> {
    let heights = compute_heights(g);
    let mut members = Vec::with_capacity(cfg.pop_size);
    for _ in 0..cfg.heuristic_seed_count {
        members.push(load_balanced_individual(g, p, &heights));
    }
    while members.len() < cfg.pop_size {
        members.push(generate_individual(g, p, &heights, rng));
    }
    evaluate_all(g, p, mode, &mut members)?;
    Ok(Population::new(members))
}

/// Runs the genetic algorithm and returns the best schedule found.
pub fn run(g: &TaskGraph, p: &Platform, cfg: &GaConfig, mode: CommMode) -> Result<RunResult> {
    run_with(g, p, cfg, mode, |_, _| {})
}

/// Like [`run`], calling `observe(generation, population)` after the
/// initial population and after every update.
pub fn run_with<F>(
    g: &TaskGraph,
    p: &Platform,
    cfg: &GaConfig,
    mode: CommMode,
    mut observe: F,
) -> Result<RunResult>
where
    F: FnMut(usize, &Population),
{
    cfg.validate()?;
    p.check_compatible(g)?;
    let started = Instant::now();
    let mut rng = GaRng::seed_from_u64(cfg.rng_seed);

    let mut pop = initial_population(g, p, cfg, mode, &mut rng)?;
    let seed_makespan = if cfg.heuristic_seed_count > 0 {
        let mut seed = load_balanced_individual(g, p, &compute_heights(g));
        Some(evaluate(g, p, &mut seed, mode)?.makespan)
    } else {
        None
    };
    observe(0, &pop);

    let mut best_series = vec![pop.best_fitness()];
    let mut stale = 0;
    let mut iterations = 0;
    while iterations < cfg.max_iters && stale < cfg.stagnation_limit {
        let mut children = breed(g, &pop, cfg, &mut rng);
        evaluate_all(g, p, mode, &mut children)?;
        let before = pop.best_fitness();
        pop = update_population(pop, children);
        iterations += 1;
        observe(iterations, &pop);
        if pop.best_fitness() < before {
            stale = 0;
        } else {
            stale += 1;
        }
        best_series.push(pop.best_fitness());
    }

    let best = pop.best_so_far;
    let timeline = simulate(g, p, &best, mode)?;
    Ok(RunResult {
        best,
        timeline,
        stats: RunStats {
            iterations,
            best_per_generation: best_series,
            seed_makespan,
            wall_time: started.elapsed(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{build_graph, is_valid_order, TaskDecl};
    use crate::evaluator::lower_bound;
    use crate::fixtures::reference_graph;
    use crate::platform::Link;

    #[test]
    fn config_defaults_and_validation() {
        let cfg = GaConfig::default();
        assert_eq!(cfg.pop_size, 100);
        assert_eq!(cfg.max_iters, 50);
        assert_eq!(cfg.pairs_per_generation, 25);
        assert!(cfg.validate().is_ok());
        let bad = |f: fn(&mut GaConfig)| {
            let mut c = GaConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.pop_size = 1));
        assert!(bad(|c| c.pairs_per_generation = 0));
        assert!(bad(|c| c.mutation_rate = 1.5));
        assert!(bad(|c| c.heuristic_seed_count = 100));
    }

    #[test]
    fn single_task_single_machine() {
        let g = build_graph(vec![TaskDecl::new("a", "a", 6.0)], vec![]).unwrap();
        let p = Platform::uniform(&[2.0], Link::new(1.0, 0.0)).unwrap();
        let r = run(&g, &p, &GaConfig::default(), CommMode::IncludeTransfer).unwrap();
        assert_eq!(r.timeline.makespan, 3.0);
        assert_eq!(r.stats.best_per_generation[0], 3.0);
    }

    #[test]
    fn same_seed_same_result() {
        let g = reference_graph();
        let p = Platform::uniform(&[1.0, 1.5, 2.0], Link::new(2.0, 0.1)).unwrap();
        let cfg = GaConfig {
            rng_seed: 42,
            ..GaConfig::default()
        };
        let a = run(&g, &p, &cfg, CommMode::IncludeTransfer).unwrap();
        let b = run(&g, &p, &cfg, CommMode::IncludeTransfer).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.stats.best_per_generation, b.stats.best_per_generation);
        assert_eq!(a.stats.iterations, b.stats.iterations);
    }

    #[test]
    fn run_respects_seed_and_bound() {
        let g = reference_graph();
        let p = Platform::uniform(&[1.0, 2.0, 3.0, 1.0], Link::new(1.0, 0.0)).unwrap();
        let cfg = GaConfig {
            rng_seed: 7,
            ..GaConfig::default()
        };
        let mut gens = 0;
        let r = run_with(&g, &p, &cfg, CommMode::IncludeTransfer, |_, pop| {
            gens += 1;
            assert_eq!(pop.len(), cfg.pop_size);
            for c in &pop.members {
                assert!(is_valid_order(&g, &c.order));
            }
        })
        .unwrap();
        assert_eq!(gens, r.stats.iterations + 1);
        assert!(r.timeline.makespan <= r.stats.seed_makespan.unwrap());
        assert!(r.timeline.makespan >= lower_bound(&g, &p) - 1e-9);
        assert!(r.stats.best_per_generation.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn stagnation_stops_early() {
        let g = build_graph(vec![TaskDecl::new("a", "a", 6.0)], vec![]).unwrap();
        let p = Platform::uniform(&[1.0, 1.0], Link::new(1.0, 0.0)).unwrap();
        let cfg = GaConfig {
            stagnation_limit: 3,
            ..GaConfig::default()
        };
        let r = run(&g, &p, &cfg, CommMode::IncludeTransfer).unwrap();
        assert_eq!(r.stats.iterations, 3);
        assert_eq!(r.stats.best_per_generation.len(), 4);
    }
}
