use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    check_axis, check_model, check_unit, ln_fidelity, FidelityRange, RegionGrid, RooflineError,
};
use crate::circuit::{CircuitMetrics, CountRecord};
use crate::exec::{map_indexed, Exec};
use crate::models::ModelKind;

/// One (gate set, topology) configuration. Side `A` configurations take
/// `f2 = x`, side `B` ones `f2 = x·y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyConfig {
    pub name: String,
    pub side_b: bool,
    pub metrics: CircuitMetrics,
    pub r1: FidelityRange,
}

impl TopologyConfig {
    fn same_setup(&self, other: &TopologyConfig) -> bool {
        self.side_b == other.side_b && self.metrics == other.metrics && self.r1 == other.r1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyCell {
    /// Index of the configuration that wins for every 1-qubit fidelity in its
    /// range, if any.
    pub winner: Option<usize>,
    pub out_of_domain: bool,
}

impl TopologyCell {
    pub fn one_qubit_dependent(&self) -> bool {
        self.winner.is_none() && !self.out_of_domain
    }
}

/// Builds the four configurations `{gate_a, gate_b} x topologies` for one
/// benchmark from count records. A missing `n1` is taken as 0.
pub fn topology_configs(
    records: &[CountRecord],
    benchmark: &str,
    gate_a: &str,
    gate_b: &str,
    topologies: &[&str],
    r1a: FidelityRange,
    r1b: FidelityRange,
) -> Result<Vec<TopologyConfig>, RooflineError> {
    let mut out = Vec::new();
    for (gate, side_b, r1) in [(gate_a, false, r1a), (gate_b, true, r1b)] {
        for &topo in topologies {
            let rec = records
                .iter()
                .find(|r| r.benchmark == benchmark && r.gate_set == gate && r.topology == topo)
                .ok_or_else(|| RooflineError::MissingCombination {
                    benchmark: benchmark.to_string(),
                    gate_set: gate.to_string(),
                    topology: topo.to_string(),
                })?;
            let n1 = rec.n1.unwrap_or(0) as usize;
            out.push(TopologyConfig {
                name: format!("{gate}/{topo}"),
                side_b,
                metrics: CircuitMetrics::from_counts(n1, rec.n2 as usize),
                r1,
            });
        }
    }
    Ok(out)
}

/// N-way comparison grid. A configuration wins a cell when its worst case
/// (1-qubit fidelity at `r1.lo`) beats every rival's best case (`r1.hi`).
/// Rivals with an identical setup are skipped and the first of them wins.
pub fn topology_compare(
    configs: &[TopologyConfig],
    xs: &[f64],
    ys: &[f64],
    model: ModelKind,
    exec: Exec,
) -> Result<RegionGrid<TopologyCell>, RooflineError> {
    check_axis("x", xs)?;
    check_axis("y", ys)?;
    for &x in xs {
        check_unit("x", x)?;
    }
    let metrics: Vec<&CircuitMetrics> = configs.iter().map(|c| &c.metrics).collect();
    check_model(model, &metrics)?;
    for c in configs {
        c.r1.check()?;
    }
    let ny = ys.len();
    let cells = map_indexed(exec, xs.len() * ny, |k| {
        let (x, y) = (xs[k / ny], ys[k % ny]);
        if x * y > 1.0 {
            return TopologyCell {
                winner: None,
                out_of_domain: true,
            };
        }
        let bounds: Vec<(f64, f64)> = configs
            .iter()
            .map(|c| {
                let f2 = if c.side_b { x * y } else { x };
                (
                    ln_fidelity(model, &c.metrics, c.r1.lo, f2),
                    ln_fidelity(model, &c.metrics, c.r1.hi, f2),
                )
            })
            .collect();
        let winner = (0..configs.len()).find(|&i| {
            (0..configs.len())
                .filter(|&j| j != i && !configs[i].same_setup(&configs[j]))
                .all(|j| bounds[i].0 > bounds[j].1)
        });
        TopologyCell {
            winner,
            out_of_domain: false,
        }
    });
    let config_echo = json!({
        "model": model,
        "configs": configs,
    });
    Ok(RegionGrid {
        x_axis: xs.to_vec(),
        y_axis: ys.to_vec(),
        cells,
        config_echo,
    })
}

impl RegionGrid<TopologyCell> {
    /// CSV with header `x,y,f2A,f2B,winner,one_qubit_dependent,domain_flag`;
    /// `winner` is the configuration name or empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let names: Vec<&str> = self.config_echo["configs"]
            .as_array()
            .map(|a| a.iter().map(|c| c["name"].as_str().unwrap_or("")).collect())
            .unwrap_or_default();
        writeln!(w, "x,y,f2A,f2B,winner,one_qubit_dependent,domain_flag")?;
        for (i, &x) in self.x_axis.iter().enumerate() {
            for (j, &y) in self.y_axis.iter().enumerate() {
                let c = self.cell(i, j);
                let name = c.winner.and_then(|k| names.get(k).copied()).unwrap_or("");
                writeln!(
                    w,
                    "{x},{y},{x},{},{name},{},{}",
                    x * y,
                    u8::from(c.one_qubit_dependent()),
                    u8::from(c.out_of_domain)
                )?;
            }
        }
        Ok(())
    }
}
