use std::io::Write;

use crate::dag::TaskGraph;
use crate::error::Result;
use crate::evaluator::{Chromosome, CommMode, Timeline};
use crate::platform::Platform;

/// Writes one `Schedule <task> on <machine>` line per task in start-time
/// order (ties by chromosome position), then `Simulation Time: <makespan>`.
pub fn write_schedule_log<W: Write>(
    g: &TaskGraph,
    p: &Platform,
    timeline: &Timeline,
    chromosome: &Chromosome,
    mut sink: W,
) -> Result<()> {
    let mut rows: Vec<usize> = (0..chromosome.order.len()).collect();
    rows.sort_by(|&a, &b| {
        let sa = timeline.start[chromosome.order[a].0];
        let sb = timeline.start[chromosome.order[b].0];
        sa.total_cmp(&sb).then(a.cmp(&b))
    });
    for i in rows {
        let t = chromosome.order[i];
        writeln!(
            sink,
            "Schedule {} on {}",
            g.task(t).name,
            p.machine(timeline.machine[t.0]).name
        )?;
    }
    writeln!(sink, "Simulation Time: {:.6}", timeline.makespan)?;
    sink.flush()?;
    Ok(())
}

pub const BENCH_HEADER: &str =
    "instance,n_tasks,n_machines,width,ccr,comm_mode,seed,ga_makespan,minmin_makespan,lower_bound,ga_runtime_ms";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub n_tasks: usize,
    pub n_machines: usize,
    pub width: usize,
    pub ccr: f64,
    pub comm_mode: CommMode,
    pub seed: u64,
    pub ga_makespan: f64,
    pub minmin_makespan: f64,
    pub lower_bound: f64,
    /// Wall time of the GA run; left empty unless timing was requested,
    /// since it is the only non-reproducible column.
    pub ga_runtime_ms: Option<u128>,
}

impl BenchRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{}",
            self.instance,
            self.n_tasks,
            self.n_machines,
            self.width,
            self.ccr,
            self.comm_mode.label(),
            self.seed,
            self.ga_makespan,
            self.minmin_makespan,
            self.lower_bound,
            self.ga_runtime_ms
                .map(|ms| ms.to_string())
                .unwrap_or_default()
        )
    }
}

pub fn write_bench_header<W: Write>(sink: &mut W) -> Result<()> {
    writeln!(sink, "{BENCH_HEADER}")?;
    Ok(())
}

pub fn write_bench_csv<'a, W, I>(rows: I, mut sink: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a BenchRow>,
{
    write_bench_header(&mut sink)?;
    for r in rows {
        writeln!(sink, "{}", r.to_csv_line())?;
    }
    sink.flush()?;
    Ok(())
}
