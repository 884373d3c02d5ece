//! Machines and the network between them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dag::{TaskGraph, TaskNode};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MachineId(pub usize);

impl MachineId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineDecl {
    pub id: String,
    pub name: String,
    pub speed: f64,
}

impl MachineDecl {
    pub fn new(id: impl Into<String>, name: impl Into<String>, speed: f64) -> Self {
        MachineDecl {
            id: id.into(),
            name: name.into(),
            speed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub bandwidth: f64,
    #[serde(default)]
    pub latency: f64,
}

impl Link {
    pub fn new(bandwidth: f64, latency: f64) -> Self {
        Link { bandwidth, latency }
    }
}

/// A directed link between two named machines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub src: String,
    pub dst: String,
    pub bandwidth: f64,
    #[serde(default)]
    pub latency: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Machine {
    pub id: MachineId,
    pub key: String,
    pub name: String,
    pub speed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Platform {
    machines: Vec<Machine>,
    by_key: HashMap<String, MachineId>,
    default_link: Option<Link>,
    // row-major src x dst
    links: Vec<Option<Link>>,
    etc: Option<Vec<Vec<f64>>>,
}

fn check_link(src: &str, dst: &str, l: Link) -> Result<()> {
    if !(l.bandwidth > 0.0) || l.bandwidth.is_nan() {
        return Err(Error::NonPositiveBandwidth {
            src: src.into(),
            dst: dst.into(),
            bandwidth: l.bandwidth,
        });
    }
    if !(l.latency >= 0.0) || !l.latency.is_finite() {
        return Err(Error::NegativeLatency {
            src: src.into(),
            dst: dst.into(),
            latency: l.latency,
        });
    }
    Ok(())
}

impl Platform {
    /// Builds a platform. `etc`, when given, holds one row per task (in task
    /// declaration order) and one column per machine.
    pub fn new(
        machines: Vec<MachineDecl>,
        default_link: Option<Link>,
        links: Vec<LinkSpec>,
        etc: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if machines.is_empty() {
            return Err(Error::NoMachines);
        }
        let mut by_key = HashMap::with_capacity(machines.len());
        let mut ms = Vec::with_capacity(machines.len());
        for (i, m) in machines.into_iter().enumerate() {
            if !(m.speed > 0.0) || !m.speed.is_finite() {
                return Err(Error::NonPositiveSpeed {
                    machine: m.id,
                    speed: m.speed,
                });
            }
            if by_key.insert(m.id.clone(), MachineId(i)).is_some() {
                return Err(Error::DuplicateMachineId(m.id));
            }
            ms.push(Machine {
                id: MachineId(i),
                key: m.id,
                name: m.name,
                speed: m.speed,
            });
        }
        if let Some(l) = default_link {
            check_link("*", "*", l)?;
        }
        let n = ms.len();
        let mut table = vec![None; n * n];
        for l in links {
            let src = *by_key
                .get(&l.src)
                .ok_or_else(|| Error::UnknownMachine(l.src.clone()))?;
            let dst = *by_key
                .get(&l.dst)
                .ok_or_else(|| Error::UnknownMachine(l.dst.clone()))?;
            let link = Link::new(l.bandwidth, l.latency);
            check_link(&l.src, &l.dst, link)?;
            table[src.0 * n + dst.0] = Some(link);
        }
        if let Some(rows) = &etc {
            for (r, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::EtcShapeMismatch {
                        rows: rows.len(),
                        cols: row.len(),
                        tasks: rows.len(),
                        machines: n,
                    });
                }
                for (c, &v) in row.iter().enumerate() {
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(Error::InvalidEtcEntry {
                            row: r,
                            col: c,
                            value: v,
                        });
                    }
                }
            }
        }
        Ok(Platform {
            machines: ms,
            by_key,
            default_link,
            links: table,
            etc,
        })
    }

    /// `n` machines with the given speeds, all pairs joined by `link`.
    pub fn uniform(speeds: &[f64], link: Link) -> Result<Self> {
        let machines = speeds
            .iter()
            .enumerate()
            .map(|(i, &s)| MachineDecl::new(format!("m{}", i + 1), format!("Machine{}", i + 1), s))
            .collect();
        Platform::new(machines, Some(link), Vec::new(), None)
    }

    pub fn len(&self) -> usize {
        self.machines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.machines.is_empty()
    }

    pub fn machines(&self) -> &[Machine] {
        &self.machines
    }

    pub fn machine(&self, id: MachineId) -> &Machine {
        &self.machines[id.0]
    }

    pub fn machine_id(&self, key: &str) -> Option<MachineId> {
        self.by_key.get(key).copied()
    }

    pub fn ids(&self) -> impl ExactSizeIterator<Item = MachineId> + '_ {
        (0..self.machines.len()).map(MachineId)
    }

    pub fn default_link(&self) -> Option<Link> {
        self.default_link
    }

    /// Explicitly listed links as (src, dst, link).
    pub fn listed_links(&self) -> impl Iterator<Item = (MachineId, MachineId, Link)> + '_ {
        let n = self.machines.len();
        self.links
            .iter()
            .enumerate()
            .filter_map(move |(i, l)| l.map(|l| (MachineId(i / n), MachineId(i % n), l)))
    }

    pub fn etc(&self) -> Option<&[Vec<f64>]> {
        self.etc.as_deref()
    }

    /// Checks that an execution-time override, if present, covers `g`.
    pub fn check_compatible(&self, g: &TaskGraph) -> Result<()> {
        match &self.etc {
            Some(rows) if rows.len() != g.len() => Err(Error::EtcShapeMismatch {
                rows: rows.len(),
                cols: self.machines.len(),
                tasks: g.len(),
                machines: self.machines.len(),
            }),
            _ => Ok(()),
        }
    }

    fn check(&self, m: MachineId) -> Result<()> {
        if m.0 < self.machines.len() {
            Ok(())
        } else {
            Err(Error::UnknownMachine(format!("#{}", m.0)))
        }
    }

    pub fn execution_time(&self, t: &TaskNode, m: MachineId) -> Result<f64> {
        self.check(m)?;
        Ok(self.exec_unchecked(t, m))
    }

    #[inline]
    pub(crate) fn exec_unchecked(&self, t: &TaskNode, m: MachineId) -> f64 {
        match &self.etc {
            Some(rows) => rows[t.id.0][m.0],
            None => t.work / self.machines[m.0].speed,
        }
    }

    /// The link used from `a` to `b`: the listed one, else the default.
    pub fn link(&self, a: MachineId, b: MachineId) -> Option<Link> {
        self.links[a.0 * self.machines.len() + b.0].or(self.default_link)
    }

    pub fn transfer_time(&self, bytes: f64, a: MachineId, b: MachineId) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Ok(0.0);
        }
        let link = self.link(a, b).ok_or_else(|| {
            Error::NoLinkDefined(
                self.machines[a.0].key.clone(),
                self.machines[b.0].key.clone(),
            )
        })?;
        Ok(link.latency + bytes / link.bandwidth)
    }
}

/// Execution time of `t` on machine `m`.
pub fn execution_time(p: &Platform, t: &TaskNode, m: MachineId) -> Result<f64> {
    p.execution_time(t, m)
}

/// Time to move `bytes` from machine `a` to machine `b`.
pub fn transfer_time(p: &Platform, bytes: f64, a: MachineId, b: MachineId) -> Result<f64> {
    p.transfer_time(bytes, a, b)
}
