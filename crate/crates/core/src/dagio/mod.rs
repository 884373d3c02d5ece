//! Documents, schedule logs, benchmark CSV and instance generation.

mod document;
mod generator;
mod report;

pub use document::{
    dag_to_json, parse_dag, parse_platform, platform_to_json, DagDocument, PlatformDocument,
};
pub use generator::{generate_platform, generate_random_dag, GenSpec};
pub use report::{write_bench_csv, write_bench_header, write_schedule_log, BenchRow, BENCH_HEADER};
