use rand::Rng;

use crate::dag::{adjust_heights, ready_tasks, HeightMap, TaskGraph};
use crate::evaluator::Chromosome;
use crate::platform::{MachineId, Platform};

/// Builds one random dependency-safe chromosome: repeatedly take a random
/// ready task, give it a random machine and lower the heights of its
/// descendants. The global map `h` is left as is.
pub fn generate_individual<R: Rng + ?Sized>(
    g: &TaskGraph,
    p: &Platform,
    h: &HeightMap,
    rng: &mut R,
) -> Chromosome {
    let mut work = h.clone();
    let mut order = Vec::with_capacity(g.len());
    let mut machines = Vec::with_capacity(g.len());
    loop {
        let ready = ready_tasks(g, &work);
        if ready.is_empty() {
            break;
        }
        let t = ready[rng.random_range(0..ready.len())];
        let m = MachineId(rng.random_range(0..p.len()));
        order.push(t);
        machines.push(m);
        work = adjust_heights(g, &work, t).expect("ready task has height 1");
    }
    Chromosome::new(order, machines)
}

/// Deterministic seed individual: first ready task each step, placed on the
/// machine with the least accumulated execution time so far.
pub fn load_balanced_individual(g: &TaskGraph, p: &Platform, h: &HeightMap) -> Chromosome {
    let mut work = h.clone();
    let mut load = vec![0.0f64; p.len()];
    let mut order = Vec::with_capacity(g.len());
    let mut machines = Vec::with_capacity(g.len());
    while let Some(&t) = ready_tasks(g, &work).first() {
        let mut best = 0;
        for m in 1..load.len() {
            if load[m] < load[best] {
                best = m;
            }
        }
        load[best] += p.exec_unchecked(g.task(t), MachineId(best));
        order.push(t);
        machines.push(MachineId(best));
        work = adjust_heights(g, &work, t).expect("ready task has height 1");
    }
    Chromosome::new(order, machines)
}

/// An evaluated population kept sorted by fitness, best first.
#[derive(Clone, Debug)]
pub struct Population {
    pub members: Vec<Chromosome>,
    pub generation: usize,
    pub best_so_far: Chromosome,
}

impl Population {
    /// Wraps evaluated members. Panics if any member lacks a fitness or the
    /// list is empty.
    pub fn new(mut members: Vec<Chromosome>) -> Self {
        assert!(!members.is_empty(), "population must not be empty");
        assert!(
            members.iter().all(|c| c.fitness.is_some()),
            "population members must be evaluated"
        );
        members.sort_by(|a, b| a.fitness_or_inf().total_cmp(&b.fitness_or_inf()));
        let best_so_far = members[0].clone();
        Population {
            members,
            generation: 0,
            best_so_far,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best_fitness(&self) -> f64 {
        self.best_so_far.fitness_or_inf()
    }
}

/// Draws `n_pairs` parent pairs by linear rank: the best of `N` members has
/// weight `N`, the worst weight 1, and members with equal fitness share the
/// mean of their ranks. The two parents of a pair are distinct members
/// (identical values are possible).
pub fn rank_select_pairs<'a, R: Rng + ?Sized>(
    pop: &'a Population,
    n_pairs: usize,
    rng: &mut R,
) -> Vec<(&'a Chromosome, &'a Chromosome)> {
    rank_select_indices(pop, n_pairs, rng)
        .into_iter()
        .map(|(a, b)| (&pop.members[a], &pop.members[b]))
        .collect()
}

/// Selection weight of each member, indexed like `members`.
pub fn rank_weights(members: &[Chromosome]) -> Vec<f64> {
    let n = members.len();
    let mut by_fitness: Vec<usize> = (0..n).collect();
    by_fitness.sort_by(|&a, &b| {
        members[a]
            .fitness_or_inf()
            .total_cmp(&members[b].fitness_or_inf())
    });
    let mut weights = vec![0.0; n];
    let mut k = 0;
    while k < n {
        let f = members[by_fitness[k]].fitness_or_inf();
        let mut end = k + 1;
        while end < n && members[by_fitness[end]].fitness_or_inf() == f {
            end += 1;
        }
        // positions k..end carry ranks n-k down to n-end+1
        let mean = (2 * n - k - end + 1) as f64 / 2.0;
        for &idx in &by_fitness[k..end] {
            weights[idx] = mean;
        }
        k = end;
    }
    weights
}

pub(crate) fn rank_select_indices<R: Rng + ?Sized>(
    pop: &Population,
    n_pairs: usize,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    let n = pop.members.len();
    assert!(n >= 2, "selection needs at least two members");
    let weights = rank_weights(&pop.members);
    let total: f64 = weights.iter().sum();
    let pick = |r: f64, skip: Option<usize>| -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &w) in weights.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            acc += w;
            last = i;
            if r < acc {
                return i;
            }
        }
        last
    };
    (0..n_pairs)
        .map(|_| {
            let first = pick(rng.random::<f64>() * total, None);
            let second = pick(rng.random::<f64>() * (total - weights[first]), Some(first));
            (first, second)
        })
        .collect()
}

/// Merges evaluated children into the population and keeps the best
/// `pop.len()`. At equal fitness incumbents rank ahead of children.
pub fn update_population(mut pop: Population, children: Vec<Chromosome>) -> Population {
    let size = pop.members.len();
    pop.members.extend(children);
    pop.members
        .sort_by(|a, b| a.fitness_or_inf().total_cmp(&b.fitness_or_inf()));
    pop.members.truncate(size);
    if pop.members[0].fitness_or_inf() < pop.best_so_far.fitness_or_inf() {
        pop.best_so_far = pop.members[0].clone();
    }
    pop.generation += 1;
    pop
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{build_graph, compute_heights, is_valid_order, EdgeDecl, TaskDecl, TaskId};
    use crate::fixtures::reference_graph;
    use crate::platform::Link;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scored(f: f64) -> Chromosome {
        Chromosome {
            order: vec![],
            machines: vec![],
            fitness: Some(f),
        }
    }

    fn fitnesses(p: &Population) -> Vec<f64> {
        p.members.iter().map(|c| c.fitness.unwrap()).collect()
    }

    #[test]
    fn random_individuals_are_valid_and_varied() {
        let g = reference_graph();
        let p = Platform::uniform(&[1.0; 7], Link::new(1.0, 0.0)).unwrap();
        let h = compute_heights(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = |k| g.task_id(k).unwrap();
        let (mut via2, mut via3) = (false, false);
        for _ in 0..1000 {
            let c = generate_individual(&g, &p, &h, &mut rng);
            assert!(is_valid_order(&g, &c.order));
            assert_eq!(c.order[0], t("t1"));
            via2 |= c.order[1] == t("t2");
            via3 |= c.order[1] == t("t3");
        }
        assert!(via2 && via3);
        assert_eq!(h, compute_heights(&g));
    }

    #[test]
    fn chain_has_one_order() {
        let g = build_graph(
            vec![
                TaskDecl::new("1", "a", 1.0),
                TaskDecl::new("2", "b", 1.0),
                TaskDecl::new("3", "c", 1.0),
            ],
            vec![EdgeDecl::new("1", "2", 0.0), EdgeDecl::new("2", "3", 0.0)],
        )
        .unwrap();
        let p = Platform::uniform(&[1.0; 3], Link::new(1.0, 0.0)).unwrap();
        let h = compute_heights(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let c = generate_individual(&g, &p, &h, &mut rng);
            assert_eq!(c.order, vec![TaskId(0), TaskId(1), TaskId(2)]);
        }
    }

    fn independent(works: &[f64]) -> TaskGraph {
        build_graph(
            works
                .iter()
                .enumerate()
                .map(|(i, &w)| TaskDecl::new(i.to_string(), i.to_string(), w))
                .collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn load_balance_examples() {
        let two = Platform::uniform(&[1.0, 1.0], Link::new(1.0, 0.0)).unwrap();
        let g = independent(&[5.0, 5.0]);
        let c = load_balanced_individual(&g, &two, &compute_heights(&g));
        assert_eq!(c.machines, vec![MachineId(0), MachineId(1)]);

        let g = independent(&[4.0, 3.0, 3.0]);
        let c = load_balanced_individual(&g, &two, &compute_heights(&g));
        assert_eq!(c.order, vec![TaskId(0), TaskId(1), TaskId(2)]);
        assert_eq!(c.machines, vec![MachineId(0), MachineId(1), MachineId(1)]);

        let one = Platform::uniform(&[1.0], Link::new(1.0, 0.0)).unwrap();
        let g = reference_graph();
        let c = load_balanced_individual(&g, &one, &compute_heights(&g));
        assert!(c.machines.iter().all(|&m| m == MachineId(0)));
        assert!(is_valid_order(&g, &c.order));
    }

    #[test]
    fn pair_of_two_is_best_and_worst() {
        let pop = Population::new(vec![scored(3.0), scored(1.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (a, b) in rank_select_indices(&pop, 100, &mut rng) {
            assert_ne!(a, b);
        }
    }

    #[test]
    fn rank_weights_are_linear() {
        let pop = Population::new(vec![scored(30.0), scored(10.0), scored(40.0), scored(20.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 100_000;
        let pairs = rank_select_indices(&pop, draws, &mut rng);
        let best = pop
            .members
            .iter()
            .position(|c| c.fitness == Some(10.0))
            .unwrap();
        let freq = pairs.iter().filter(|(a, _)| *a == best).count() as f64 / draws as f64;
        assert!((freq - 0.4).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn equal_fitness_selects_uniformly() {
        let pop = Population::new(vec![scored(5.0); 5]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let draws = 100_000;
        let mut counts = [0usize; 5];
        for (a, b) in rank_select_indices(&pop, draws, &mut rng) {
            counts[a] += 1;
            counts[b] += 1;
        }
        for c in counts {
            let f = c as f64 / (2 * draws) as f64;
            assert!((f - 0.2).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn tied_members_share_rank() {
        let w = rank_weights(&[scored(2.0), scored(1.0), scored(2.0), scored(3.0)]);
        assert_eq!(w, vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn update_keeps_best() {
        let pop = Population::new(vec![scored(10.0), scored(20.0), scored(30.0)]);
        let pop = update_population(pop, vec![scored(15.0), scored(25.0), scored(35.0)]);
        assert_eq!(fitnesses(&pop), vec![10.0, 15.0, 20.0]);
        assert_eq!(pop.best_fitness(), 10.0);

        let pop = update_population(pop, vec![scored(99.0)]);
        assert_eq!(fitnesses(&pop), vec![10.0, 15.0, 20.0]);

        let pop = update_population(pop, vec![scored(1.0)]);
        assert_eq!(fitnesses(&pop), vec![1.0, 10.0, 15.0]);
        assert_eq!(pop.best_fitness(), 1.0);
        assert_eq!(pop.generation, 3);
    }

    #[test]
    fn update_prefers_incumbents_on_ties() {
        let mut incumbent = scored(10.0);
        incumbent.order = vec![TaskId(0)];
        let pop = Population::new(vec![incumbent.clone(), scored(5.0)]);
        let pop = update_population(pop, vec![scored(10.0)]);
        assert_eq!(pop.members[1], incumbent);
    }
}
