//! Command-line front end.

use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig, Shape};
use crate::dag::{compute_heights, TaskGraph};
use crate::dagio::{
    dag_to_json, generate_platform, generate_random_dag, parse_dag, parse_platform,
    platform_to_json, write_bench_header, write_schedule_log, GenSpec,
};
use crate::error::Error;
use crate::evaluator::CommMode;
use crate::ga::{self, CrossoverMode, GaConfig};
use crate::minmin::min_min_schedule;
use crate::platform::{Link, Platform};

#[derive(Debug, Parser)]
#[command(
    name = "dagsched",
    version,
    about = "Schedule DAG workflows on heterogeneous machines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a DAG and a platform and report what they contain.
    Validate { dag: PathBuf, platform: PathBuf },
    /// Print the height of every task.
    Heights { dag: PathBuf },
    /// Schedule a DAG on a platform and write the schedule log.
    Schedule(ScheduleArgs),
    /// Compare the GA against min-min over generated instances.
    Bench(BenchArgs),
    /// Generate a random layered DAG document.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Ga,
    Minmin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Crossover {
    Order,
    Aligned,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Comm {
    On,
    Off,
}

impl From<Comm> for CommMode {
    fn from(c: Comm) -> Self {
        match c {
            Comm::On => CommMode::IncludeTransfer,
            Comm::Off => CommMode::IgnoreTransfer,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GaArgs {
    /// Population size.
    #[arg(long, default_value_t = 100)]
    pub pop: usize,
    /// Maximum number of generations.
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    /// Stop after this many generations without improvement.
    #[arg(long)]
    pub stagnation: Option<usize>,
    /// Parent pairs per generation (default: pop / 4).
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub mutation_rate: f64,
    #[arg(long, value_enum, default_value_t = Crossover::Mixed)]
    pub crossover: Crossover,
    /// Load-balanced individuals placed in the initial population.
    #[arg(long, default_value_t = 1)]
    pub heuristic_seeds: usize,
}

impl GaArgs {
    pub fn config(&self, seed: u64) -> GaConfig {
        let base = GaConfig::with_pop_size(self.pop);
        GaConfig {
            max_iters: self.iters,
            stagnation_limit: self.stagnation.unwrap_or(self.iters),
            pairs_per_generation: self.pairs.unwrap_or(base.pairs_per_generation),
            crossover_mode: match self.crossover {
                Crossover::Order => CrossoverMode::OrderPreserving,
                Crossover::Aligned => CrossoverMode::TaskAligned,
                Crossover::Mixed => CrossoverMode::Mixed,
            },
            mutation_rate: self.mutation_rate,
            heuristic_seed_count: self.heuristic_seeds,
            rng_seed: seed,
            ..base
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    pub dag: PathBuf,
    pub platform: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Ga)]
    pub alg: Algorithm,
    #[command(flatten)]
    pub ga: GaArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Whether data transfer between machines delays dependent tasks.
    #[arg(long, value_enum, default_value_t = Comm::On)]
    pub comm: Comm,
    /// Schedule log path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated shapes TASKSxMACHINES[:WIDTH]; defaults to the
    /// nine-shape reference grid.
    #[arg(long, value_delimiter = ',')]
    pub shapes: Vec<Shape>,
    /// Seeds per shape.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// First instance seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub ccr: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth: f64,
    #[arg(long, default_value_t = 1.0)]
    pub speed_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub speed_max: f64,
    #[arg(long, value_enum, default_value_t = Comm::On)]
    pub comm: Comm,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Fill the ga_runtime_ms column (makes the CSV non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub tasks: usize,
    #[arg(long, default_value_t = 3)]
    pub width: usize,
    #[arg(long, default_value_t = 0.5)]
    pub ccr: f64,
    #[arg(long, default_value_t = 5.0)]
    pub work_min: f64,
    #[arg(long, default_value_t = 25.0)]
    pub work_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// DAG document path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a platform document with this many machines.
    #[arg(long, requires = "platform_out")]
    pub machines: Option<usize>,
    #[arg(long)]
    pub platform_out: Option<PathBuf>,
}

/// A failure with the context it happened in.
#[derive(Debug)]
pub struct CliError {
    pub context: String,
    pub source: Error,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.context, self.source)
    }
}

impl std::error::Error for CliError {}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn ctx<T>(context: impl fmt::Display, r: crate::error::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError {
        context: context.to_string(),
        source,
    })
}

fn io_ctx<T>(context: impl fmt::Display, r: io::Result<T>) -> CliResult<T> {
    ctx(context, r.map_err(Error::from))
}

fn read(path: &Path) -> CliResult<String> {
    io_ctx(path.display(), fs::read_to_string(path))
}

fn load_dag(path: &Path) -> CliResult<TaskGraph> {
    ctx(path.display(), parse_dag(&read(path)?))
}

fn load_platform(path: &Path) -> CliResult<Platform> {
    ctx(path.display(), parse_platform(&read(path)?))
}

fn open_sink<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> CliResult<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(io_ctx(p.display(), fs::File::create(p))?)),
        None => Box::new(stdout),
    })
}

/// Runs one invocation, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Validate { dag, platform } => cmd_validate(&dag, &platform, out),
        Command::Heights { dag } => cmd_heights(&dag, out),
        Command::Schedule(args) => cmd_schedule(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
        Command::Gen(args) => cmd_gen(&args, out),
    }
}

pub fn cmd_validate(dag: &Path, platform: &Path, out: &mut dyn Write) -> CliResult {
    let g = load_dag(dag)?;
    let p = load_platform(platform)?;
    ctx(platform.display(), p.check_compatible(&g))?;
    let names = |ids: Vec<crate::dag::TaskId>| {
        ids.into_iter()
            .map(|t| g.task(t).name.clone())
            .collect::<Vec<_>>()
            .join(",")
    };
    io_ctx(
        "stdout",
        writeln!(
            out,
            "{} tasks, {} machines, entry={}, exit={}\nacyclic: yes",
            g.len(),
            p.len(),
            names(g.entries()),
            names(g.exits())
        ),
    )
}

pub fn cmd_heights(dag: &Path, out: &mut dyn Write) -> CliResult {
    let g = load_dag(dag)?;
    let h = compute_heights(&g);
    let mut text = String::from("task\theight\n");
    for t in g.tasks() {
        text.push_str(&format!("{}\t{}\n", t.name, h.get(t.id)));
    }
    io_ctx("stdout", out.write_all(text.as_bytes()))
}

pub fn cmd_schedule(args: &ScheduleArgs, out: &mut dyn Write) -> CliResult {
    let g = load_dag(&args.dag)?;
    let p = load_platform(&args.platform)?;
    let mode = CommMode::from(args.comm);
    let (chromosome, timeline, summary) = match args.alg {
        Algorithm::Ga => {
            let cfg = args.ga.config(args.seed);
            let r = ctx("ga", ga::run(&g, &p, &cfg, mode))?;
            let summary = format!(
                "algorithm: ga\nmakespan: {:.6}\niterations: {}\nseed: {}\ncomm: {}\n",
                r.timeline.makespan,
                r.stats.iterations,
                args.seed,
                mode.label()
            );
            (r.best, r.timeline, summary)
        }
        Algorithm::Minmin => {
            let (c, tl) = ctx("min-min", min_min_schedule(&g, &p, mode))?;
            let summary = format!(
                "algorithm: minmin\nmakespan: {:.6}\ncomm: {}\n",
                tl.makespan,
                mode.label()
            );
            (c, tl, summary)
        }
    };
    {
        let sink = open_sink(args.out.as_deref(), out)?;
        let where_ = args
            .out
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "stdout".into());
        ctx(
            where_,
            write_schedule_log(&g, &p, &timeline, &chromosome, sink),
        )?;
    }
    io_ctx("stdout", out.write_all(summary.as_bytes()))
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult {
    let cfg = BenchConfig {
        shapes: if args.shapes.is_empty() {
            bench::default_shapes()
        } else {
            args.shapes.clone()
        },
        seeds: args.seeds,
        base_seed: args.seed,
        ccr: args.ccr,
        speed_range: (args.speed_min, args.speed_max),
        link: Link::new(args.bandwidth, 0.0),
        comm: args.comm.into(),
        ga: args.ga.config(0),
        timing: args.timing,
        ..BenchConfig::default()
    };
    ctx("bench", cfg.ga.validate())?;

    let results = bench::run_bench(&cfg);
    let mut rows = Vec::with_capacity(results.len());
    let mut failure = None;
    {
        let where_ = args
            .out
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "stdout".into());
        let mut sink = open_sink(args.out.as_deref(), out)?;
        ctx(&where_, write_bench_header(&mut sink))?;
        for r in results {
            match r {
                Ok(o) => {
                    io_ctx(&where_, writeln!(sink, "{}", o.row.to_csv_line()))?;
                    rows.push(o.row);
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        io_ctx(&where_, sink.flush())?;
    }
    if let Some(e) = failure {
        return ctx("bench", Err(e));
    }
    let wins = bench::ga_win_fraction(&rows);
    io_ctx(
        "stdout",
        writeln!(
            out,
            "instances: {}\ncomm: {}\nccr: {}\npop: {} iters: {} pairs: {} mutation_rate: {} crossover: {:?}\nga <= minmin fraction: {:.2}",
            rows.len(),
            cfg.comm.label(),
            cfg.ccr,
            cfg.ga.pop_size,
            cfg.ga.max_iters,
            cfg.ga.pairs_per_generation,
            cfg.ga.mutation_rate,
            cfg.ga.crossover_mode,
            wins
        ),
    )
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CliResult {
    let spec = GenSpec {
        n_tasks: args.tasks,
        width: args.width,
        ccr: args.ccr,
        work_range: (args.work_min, args.work_max),
        bandwidth: args.bandwidth,
        seed: args.seed,
    };
    let (g, layers) = ctx("gen", generate_random_dag(&spec))?;
    let doc = dag_to_json(&g);
    let summary = format!(
        "{} tasks, {} edges, {} layers, seed {}\n",
        g.len(),
        g.edges().len(),
        layers.iter().max().map_or(0, |l| l + 1),
        args.seed
    );
    match &args.out {
        Some(path) => {
            io_ctx(path.display(), fs::write(path, doc))?;
            io_ctx("stdout", out.write_all(summary.as_bytes()))?;
        }
        None => io_ctx("stdout", out.write_all(doc.as_bytes()))?,
    }
    if let (Some(n), Some(path)) = (args.machines, &args.platform_out) {
        let p = ctx(
            "gen",
            generate_platform(n, (1.0, 2.0), Link::new(args.bandwidth, 0.0), args.seed),
        )?;
        io_ctx(path.display(), fs::write(path, platform_to_json(&p)))?;
    }
    Ok(())
}
