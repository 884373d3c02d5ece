use serde::{Deserialize, Serialize};

use crate::dag::{build_graph, EdgeDecl, TaskDecl, TaskGraph};
use crate::error::{Error, Result};
use crate::platform::{Link, LinkSpec, MachineDecl, Platform};

/// JSON form of a task graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DagDocument {
    pub tasks: Vec<TaskDecl>,
    #[serde(default)]
    pub edges: Vec<EdgeDecl>,
}

/// JSON form of a platform. `etc` rows follow the task order of the DAG the
/// platform is used with; columns follow `machines`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformDocument {
    pub machines: Vec<MachineDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_link: Option<Link>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<LinkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etc: Option<Vec<Vec<f64>>>,
}

impl DagDocument {
    pub fn from_graph(g: &TaskGraph) -> Self {
        DagDocument {
            tasks: g
                .tasks()
                .iter()
                .map(|t| TaskDecl::new(t.key.clone(), t.name.clone(), t.work))
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| {
                    EdgeDecl::new(
                        g.task(e.src).key.clone(),
                        g.task(e.dst).key.clone(),
                        e.bytes,
                    )
                })
                .collect(),
        }
    }

    pub fn into_graph(self) -> Result<TaskGraph> {
        if self.tasks.is_empty() {
            return Err(Error::Schema("`tasks` must not be empty".into()));
        }
        build_graph(self.tasks, self.edges)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

impl PlatformDocument {
    pub fn from_platform(p: &Platform) -> Self {
        PlatformDocument {
            machines: p
                .machines()
                .iter()
                .map(|m| MachineDecl::new(m.key.clone(), m.name.clone(), m.speed))
                .collect(),
            default_link: p.default_link(),
            links: p
                .listed_links()
                .map(|(a, b, l)| LinkSpec {
                    src: p.machine(a).key.clone(),
                    dst: p.machine(b).key.clone(),
                    bandwidth: l.bandwidth,
                    latency: l.latency,
                })
                .collect(),
            etc: p.etc().map(<[_]>::to_vec),
        }
    }

    pub fn into_platform(self) -> Result<Platform> {
        if self.machines.is_empty() {
            return Err(Error::Schema("`machines` must not be empty".into()));
        }
        Platform::new(self.machines, self.default_link, self.links, self.etc)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

/// Parses and validates a DAG document.
pub fn parse_dag(text: &str) -> Result<TaskGraph> {
    serde_json::from_str::<DagDocument>(text)?.into_graph()
}

/// Parses and validates a platform document.
pub fn parse_platform(text: &str) -> Result<Platform> {
    serde_json::from_str::<PlatformDocument>(text)?.into_platform()
}

pub fn dag_to_json(g: &TaskGraph) -> String {
    DagDocument::from_graph(g).to_json()
}

pub fn platform_to_json(p: &Platform) -> String {
    PlatformDocument::from_platform(p).to_json()
}
