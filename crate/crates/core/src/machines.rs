//! Machine datasheets: gate fidelities, topology and derived coupling counts.

use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models;

const BUNDLED: &str = include_str!("../data/machines.json");

#[derive(Debug, Error)]
pub enum MachineError {
    #[error("datasheet schema error at `{pointer}`: {message}")]
    Schema { pointer: String, message: String },
    #[error("value {value} at `{pointer}` is outside [0, 1]")]
    Range { pointer: String, value: f64 },
    #[error("invalid datasheet entry at `{pointer}`: {message}")]
    Invalid { pointer: String, message: String },
    #[error("duplicate machine name `{0}`")]
    Duplicate(String),
    #[error("unknown machine `{0}`")]
    Unknown(String),
    #[error("machine `{machine}` has no gate `{gate}`")]
    UnknownGate { machine: String, gate: String },
    #[error("datasheet I/O: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub name: String,
    pub arity: usize,
    pub avg_fidelity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process_infidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_error: Option<f64>,
}

impl GateSpec {
    pub fn new(name: &str, arity: usize, avg_fidelity: f64) -> Self {
        GateSpec {
            name: name.to_string(),
            arity,
            avg_fidelity,
            process_infidelity: None,
            coupling_error: None,
        }
    }

    /// Process infidelity `e = 1 - γ`, from the stored value or else derived
    /// from the average fidelity over `2^arity` dimensions.
    pub fn process_infidelity(&self) -> f64 {
        self.process_infidelity.unwrap_or_else(|| {
            1.0 - models::average_to_process(self.avg_fidelity, self.arity).unwrap_or(0.0)
        })
    }
}

/// Coupling graph shape as it appears in the datasheet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Topology {
    AllToAll,
    /// Row-major `rows x cols` mesh; the last row may be partial.
    Grid {
        rows: usize,
        cols: usize,
    },
    Linear,
    Custom {
        edges: Vec<[usize; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopologySpec {
    pub topology: Topology,
    pub qubit_count: usize,
}

/// Average number of other qubits each qubit couples to while executing a
/// 1-qubit (`c1`) or 2-qubit (`c2`) gate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingCounts {
    pub c1: f64,
    pub c2: f64,
}

impl TopologySpec {
    pub fn new(topology: Topology, qubit_count: usize) -> Self {
        TopologySpec {
            topology,
            qubit_count,
        }
    }

    pub fn all_to_all(n: usize) -> Self {
        Self::new(Topology::AllToAll, n)
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        Self::new(Topology::Grid { rows, cols }, rows * cols)
    }

    pub fn linear(n: usize) -> Self {
        Self::new(Topology::Linear, n)
    }

    /// Undirected edge list, deduplicated, each as `(low, high)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.qubit_count;
        let mut edges: Vec<(usize, usize)> = match &self.topology {
            Topology::AllToAll => (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect(),
            Topology::Linear => (1..n).map(|b| (b - 1, b)).collect(),
            Topology::Grid { cols, .. } => {
                let cols = *cols;
                let mut e = Vec::new();
                for q in 0..n {
                    if (q + 1) % cols != 0 && q + 1 < n {
                        e.push((q, q + 1));
                    }
                    if q + cols < n {
                        e.push((q, q + cols));
                    }
                }
                e
            }
            Topology::Custom { edges } => {
                edges.iter().map(|&[a, b]| (a.min(b), a.max(b))).collect()
            }
        };
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    fn validate(&self, pointer: &str) -> Result<(), MachineError> {
        let n = self.qubit_count;
        let bad = |message: String| MachineError::Invalid {
            pointer: pointer.to_string(),
            message,
        };
        match &self.topology {
            Topology::Grid { rows, cols } => {
                if *rows == 0 || *cols == 0 || rows * cols < n || (rows - 1) * cols >= n {
                    return Err(bad(format!(
                        "grid {rows}x{cols} does not hold exactly {n} qubits row-major"
                    )));
                }
            }
            Topology::Custom { edges } => {
                for (i, &[a, b]) in edges.iter().enumerate() {
                    if a >= n || b >= n {
                        return Err(MachineError::Invalid {
                            pointer: format!("{pointer}/edges/{i}"),
                            message: format!("edge ({a}, {b}) references a qubit outside 0..{n}"),
                        });
                    }
                    if a == b {
                        return Err(MachineError::Invalid {
                            pointer: format!("{pointer}/edges/{i}"),
                            message: format!("self-loop on qubit {a}"),
                        });
                    }
                }
            }
            Topology::AllToAll | Topology::Linear => {}
        }
        Ok(())
    }
}

/// Coupling counts of a topology. All-to-all uses `C2 = n(n-1)/2` and
/// `C1 = n - 1`; every other kind uses the average vertex degree for both.
pub fn coupling_counts(t: &TopologySpec) -> CouplingCounts {
    let n = t.qubit_count;
    if n == 0 {
        return CouplingCounts { c1: 0.0, c2: 0.0 };
    }
    if t.topology == Topology::AllToAll {
        let n = n as f64;
        return CouplingCounts {
            c1: n - 1.0,
            c2: n * (n - 1.0) / 2.0,
        };
    }
    let deg = 2.0 * t.edges().len() as f64 / n as f64;
    CouplingCounts { c1: deg, c2: deg }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineConfig {
    pub name: String,
    pub technology: String,
    pub qubit_count: usize,
    pub topology: Topology,
    pub gates: Vec<GateSpec>,
}

impl MachineConfig {
    pub fn topology_spec(&self) -> TopologySpec {
        TopologySpec::new(self.topology.clone(), self.qubit_count)
    }

    pub fn coupling_counts(&self) -> CouplingCounts {
        coupling_counts(&self.topology_spec())
    }

    /// Gate by name, case-insensitive.
    pub fn gate(&self, name: &str) -> Option<&GateSpec> {
        self.gates
            .iter()
            .find(|g| g.name.eq_ignore_ascii_case(name))
    }

    /// The named gate, or the first gate of the requested arity.
    pub fn gate_or_default(
        &self,
        arity: usize,
        name: Option<&str>,
    ) -> Result<&GateSpec, MachineError> {
        let found = match name {
            Some(n) => self.gate(n).filter(|g| g.arity == arity),
            None => self.gates.iter().find(|g| g.arity == arity),
        };
        found.ok_or_else(|| MachineError::UnknownGate {
            machine: self.name.clone(),
            gate: name.map_or_else(|| format!("<any {arity}-qubit gate>"), str::to_string),
        })
    }

    fn validate(&self, pointer: &str) -> Result<(), MachineError> {
        let bad = |sub: &str, message: String| MachineError::Invalid {
            pointer: format!("{pointer}{sub}"),
            message,
        };
        if self.qubit_count < 2 {
            return Err(bad(
                "/qubit_count",
                format!("need at least 2 qubits, got {}", self.qubit_count),
            ));
        }
        for (i, g) in self.gates.iter().enumerate() {
            let gp = format!("{pointer}/gates/{i}");
            if g.arity != 1 && g.arity != 2 {
                return Err(MachineError::Invalid {
                    pointer: format!("{gp}/arity"),
                    message: format!("arity {} is not 1 or 2", g.arity),
                });
            }
            let fields = [
                ("avg_fidelity", Some(g.avg_fidelity)),
                ("process_infidelity", g.process_infidelity),
                ("coupling_error", g.coupling_error),
            ];
            for (field, v) in fields {
                if let Some(v) = v {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(MachineError::Range {
                            pointer: format!("{gp}/{field}"),
                            value: v,
                        });
                    }
                }
            }
        }
        for arity in [1, 2] {
            if !self.gates.iter().any(|g| g.arity == arity) {
                return Err(bad(
                    "/gates",
                    format!("needs at least one {arity}-qubit gate"),
                ));
            }
        }
        self.topology_spec()
            .validate(&format!("{pointer}/topology"))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Datasheet {
    machines: Vec<MachineConfig>,
}

/// Validated machines keyed by name, in file order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Registry {
    machines: IndexMap<String, MachineConfig>,
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl Registry {
    /// The datasheet shipped with the crate. Its fidelities are editable data;
    /// pass a file through [`Registry::load`] to override them.
    pub fn bundled() -> Registry {
        Registry::from_json_str(BUNDLED).expect("bundled datasheet is valid")
    }

    pub fn from_json_str(text: &str) -> Result<Registry, MachineError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let sheet: Datasheet =
            serde_path_to_error::deserialize(de).map_err(|e| MachineError::Schema {
                pointer: json_pointer(e.path()),
                message: e.inner().to_string(),
            })?;
        let mut reg = Registry::default();
        for (i, m) in sheet.machines.into_iter().enumerate() {
            m.validate(&format!("/machines/{i}"))?;
            if reg.machines.contains_key(&m.name) {
                return Err(MachineError::Duplicate(m.name));
            }
            reg.machines.insert(m.name.clone(), m);
        }
        Ok(reg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Registry, MachineError> {
        Registry::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        let sheet = Datasheet {
            machines: self.machines.values().cloned().collect(),
        };
        serde_json::to_string_pretty(&sheet).expect("datasheet serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MachineError> {
        fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }

    pub fn insert(&mut self, m: MachineConfig) -> Result<(), MachineError> {
        m.validate("")?;
        if self.machines.contains_key(&m.name) {
            return Err(MachineError::Duplicate(m.name));
        }
        self.machines.insert(m.name.clone(), m);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&MachineConfig> {
        self.machines.get(name)
    }

    /// Exact name first, then a case-insensitive match on the full name or
    /// on any single word of it ("H2", "falcon").
    pub fn lookup(&self, name: &str) -> Result<&MachineConfig, MachineError> {
        if let Some(m) = self.machines.get(name) {
            return Ok(m);
        }
        let hits: Vec<&MachineConfig> = self
            .machines
            .values()
            .filter(|m| {
                m.name.eq_ignore_ascii_case(name)
                    || m.name
                        .split_whitespace()
                        .any(|w| w.eq_ignore_ascii_case(name))
            })
            .collect();
        match hits.as_slice() {
            [m] => Ok(m),
            _ => Err(MachineError::Unknown(name.to_string())),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &MachineConfig> {
        self.machines.values()
    }

    pub fn len(&self) -> usize {
        self.machines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.machines.is_empty()
    }
}
