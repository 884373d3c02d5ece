use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph has no tasks")]
    EmptyGraph,
    #[error("duplicate task id `{0}`")]
    DuplicateTaskId(String),
    #[error("edge {src} -> {dst} names unknown task `{missing}`")]
    UnknownEdgeEndpoint {
        src: String,
        dst: String,
        missing: String,
    },
    #[error("self loop on task `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("cycle detected: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("task `{task}` has invalid work {work}")]
    InvalidWork { task: String, work: f64 },
    #[error("edge {src} -> {dst} has invalid data volume {bytes}")]
    InvalidBytes {
        src: String,
        dst: String,
        bytes: f64,
    },
    #[error("task `{0}` is not ready (current height is not 1)")]
    NotReady(String),

    #[error("platform has no machines")]
    NoMachines,
    #[error("duplicate machine id `{0}`")]
    DuplicateMachineId(String),
    #[error("unknown machine `{0}`")]
    UnknownMachine(String),
    #[error("machine `{machine}` has non-positive speed {speed}")]
    NonPositiveSpeed { machine: String, speed: f64 },
    #[error("link {src} -> {dst} has non-positive bandwidth {bandwidth}")]
    NonPositiveBandwidth {
        src: String,
        dst: String,
        bandwidth: f64,
    },
    #[error("link {src} -> {dst} has negative latency {latency}")]
    NegativeLatency {
        src: String,
        dst: String,
        latency: f64,
    },
    #[error("no link defined between `{0}` and `{1}` and no default link configured")]
    NoLinkDefined(String, String),
    #[error("execution-time matrix is {rows}x{cols}, expected {tasks}x{machines}")]
    EtcShapeMismatch {
        rows: usize,
        cols: usize,
        tasks: usize,
        machines: usize,
    },
    #[error("execution-time matrix entry ({row}, {col}) is invalid: {value}")]
    InvalidEtcEntry { row: usize, col: usize, value: f64 },

    #[error("invalid chromosome order: {0}")]
    InvalidOrder(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof => Error::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
            Category::Data => Error::Schema(e.to_string()),
            Category::Io => Error::Io(e.to_string()),
        }
    }
}
