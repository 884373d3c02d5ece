//! Min-min list scheduling over a ready set, the comparison baseline.

use crate::dag::{TaskGraph, TaskId};
use crate::error::Result;
use crate::evaluator::{Chromosome, CommMode, Timeline};
use crate::platform::{MachineId, Platform};

/// Repeatedly commits the ready (task, machine) pair with the earliest
/// completion time. Ties go to the earlier-declared task, then machine.
/// Start times follow the same rules as [`crate::evaluator::simulate`], so
/// replaying the returned chromosome reproduces the returned timeline.
pub fn min_min_schedule(
    g: &TaskGraph,
    p: &Platform,
    mode: CommMode,
) -> Result<(Chromosome, Timeline)> {
    p.check_compatible(g)?;
    let n = g.len();
    let mut waiting: Vec<usize> = g.ids().map(|t| g.parent_count(t)).collect();
    let mut ready: Vec<TaskId> = g.ids().filter(|&t| waiting[t.0] == 0).collect();
    let mut available = vec![0.0f64; p.len()];
    let mut start = vec![0.0; n];
    let mut finish = vec![0.0; n];
    let mut machine = vec![MachineId(0); n];
    let mut order = Vec::with_capacity(n);
    let mut hosts = Vec::with_capacity(n);

    while !ready.is_empty() {
        // (slot in ready, machine, start, finish)
        let mut best: Option<(usize, MachineId, f64, f64)> = None;
        for (slot, &t) in ready.iter().enumerate() {
            for m in p.ids() {
                let mut data_ready = 0.0f64;
                for (q, bytes) in g.parents(t) {
                    let arrive = match mode {
                        CommMode::IncludeTransfer => {
                            finish[q.0] + p.transfer_time(bytes, machine[q.0], m)?
                        }
                        CommMode::IgnoreTransfer => finish[q.0],
                    };
                    data_ready = data_ready.max(arrive);
                }
                let s = data_ready.max(available[m.0]);
                let f = s + p.exec_unchecked(g.task(t), m);
                let better = match best {
                    None => true,
                    Some((bslot, bm, _, bf)) => f < bf || (f == bf && (t, m) < (ready[bslot], bm)),
                };
                if better {
                    best = Some((slot, m, s, f));
                }
            }
        }
        let (slot, m, s, f) = best.expect("ready set is non-empty");
        let t = ready.remove(slot);
        start[t.0] = s;
        finish[t.0] = f;
        machine[t.0] = m;
        available[m.0] = f;
        order.push(t);
        hosts.push(m);
        for (c, _) in g.children(t) {
            waiting[c.0] -= 1;
            if waiting[c.0] == 0 {
                let at = ready.partition_point(|&r| r < c);
                ready.insert(at, c);
            }
        }
    }

    let makespan = finish.iter().copied().fold(0.0, f64::max);
    let mut chromosome = Chromosome::new(order, hosts);
    chromosome.fitness = Some(makespan);
    Ok((
        chromosome,
        Timeline {
            start,
            finish,
            machine,
            makespan,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{build_graph, is_valid_order, TaskDecl};
    use crate::evaluator::{lower_bound, simulate};
    use crate::fixtures::reference_graph;
    use crate::platform::Link;

    #[test]
    fn single_task_goes_to_fastest() {
        let g = build_graph(vec![TaskDecl::new("a", "a", 10.0)], vec![]).unwrap();
        let p = Platform::uniform(&[1.0, 2.0], Link::new(1.0, 0.0)).unwrap();
        let (c, tl) = min_min_schedule(&g, &p, CommMode::IncludeTransfer).unwrap();
        assert_eq!(c.machines, vec![MachineId(1)]);
        assert_eq!(tl.makespan, 5.0);
    }

    #[test]
    fn independent_pair_is_split() {
        let g = build_graph(
            vec![TaskDecl::new("a", "a", 4.0), TaskDecl::new("b", "b", 4.0)],
            vec![],
        )
        .unwrap();
        let p = Platform::uniform(&[1.0, 1.0], Link::new(1.0, 0.0)).unwrap();
        let (c, tl) = min_min_schedule(&g, &p, CommMode::IncludeTransfer).unwrap();
        assert_eq!(c.machines, vec![MachineId(0), MachineId(1)]);
        assert_eq!(tl.makespan, 4.0);
    }

    #[test]
    fn reference_schedule_is_self_consistent() {
        let g = reference_graph();
        let p = Platform::uniform(&[1.0, 1.3, 0.7], Link::new(2.0, 0.5)).unwrap();
        for mode in [CommMode::IncludeTransfer, CommMode::IgnoreTransfer] {
            let (c, tl) = min_min_schedule(&g, &p, mode).unwrap();
            assert!(is_valid_order(&g, &c.order));
            assert_eq!(simulate(&g, &p, &c, mode).unwrap(), tl);
            assert!(tl.makespan >= lower_bound(&g, &p));
            assert_eq!(c.fitness, Some(tl.makespan));
        }
    }
}
