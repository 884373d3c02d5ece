//! Crossover and mutation. None of these touch a chromosome's task order
//! in a way that could break a dependency.

use rand::Rng;

use crate::dag::TaskGraph;
use crate::evaluator::Chromosome;

/// Position-wise machine exchange from `point` onward. Orders are kept.
pub fn crossover_order_preserving(
    p1: &Chromosome,
    p2: &Chromosome,
    point: usize,
) -> (Chromosome, Chromosome) {
    debug_assert_eq!(p1.len(), p2.len());
    let point = point.min(p1.len());
    let mut m1 = p1.machines.clone();
    let mut m2 = p2.machines.clone();
    m1[point..].copy_from_slice(&p2.machines[point..]);
    m2[point..].copy_from_slice(&p1.machines[point..]);
    (
        Chromosome::new(p1.order.clone(), m1),
        Chromosome::new(p2.order.clone(), m2),
    )
}

/// Machine exchange by task identity: every task at or after `point` in
/// `p1`'s order takes the other parent's machine for that same task, in
/// both children. Orders are kept.
pub fn crossover_task_aligned(
    p1: &Chromosome,
    p2: &Chromosome,
    point: usize,
) -> (Chromosome, Chromosome) {
    debug_assert_eq!(p1.len(), p2.len());
    let n = p1.len();
    let point = point.min(n);
    let mut swap = vec![false; n];
    for t in &p1.order[point..] {
        swap[t.0] = true;
    }
    let host1 = p1.assignment();
    let host2 = p2.assignment();
    let remap = |parent: &Chromosome, other: &[crate::platform::MachineId]| {
        parent
            .order
            .iter()
            .zip(&parent.machines)
            .map(|(t, &m)| if swap[t.0] { other[t.0] } else { m })
            .collect::<Vec<_>>()
    };
    (
        Chromosome::new(p1.order.clone(), remap(p1, &host2)),
        Chromosome::new(p2.order.clone(), remap(p2, &host1)),
    )
}

/// Whether swapping positions `i < j` keeps the order valid: nothing in
/// `i+1..=j` depends on the task at `i`, and the task at `j` depends on
/// nothing in `i..j`.
pub fn swap_is_safe(g: &TaskGraph, c: &Chromosome, i: usize, j: usize) -> bool {
    debug_assert!(i < j);
    let a = c.order[i];
    let b = c.order[j];
    c.order[i + 1..=j].iter().all(|&t| !g.is_ancestor(a, t))
        && c.order[i..j].iter().all(|&t| !g.is_ancestor(t, b))
}

/// Swaps a random dependency-safe pair of genes (task with its machine).
/// Gives up after `n²` draws and returns the input unchanged.
pub fn mutate<R: Rng + ?Sized>(g: &TaskGraph, c: &Chromosome, rng: &mut R) -> Chromosome {
    let n = c.len();
    if n < 2 {
        return c.clone();
    }
    for _ in 0..n * n {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        if swap_is_safe(g, c, i, j) {
            let mut out = Chromosome::new(c.order.clone(), c.machines.clone());
            out.order.swap(i, j);
            out.machines.swap(i, j);
            return out;
        }
    }
    c.clone()
}
