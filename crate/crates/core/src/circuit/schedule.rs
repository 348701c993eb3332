use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub n1: usize,
    pub n2: usize,
    pub by_name: BTreeMap<String, usize>,
}

pub fn gate_counts(c: &Circuit) -> GateCounts {
    let mut counts = GateCounts::default();
    for g in c.gates() {
        match g.arity() {
            1 => counts.n1 += 1,
            _ => counts.n2 += 1,
        }
        *counts
            .by_name
            .entry(g.kind().label().to_string())
            .or_default() += 1;
    }
    counts
}

/// One ASAP layer: gates on pairwise-disjoint qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub index: usize,
    /// Positions of the gates in the source circuit, ascending.
    pub gate_indices: Vec<usize>,
    pub gates: Vec<Gate>,
}

/// ASAP layering: each gate lands one layer after the latest layer already
/// occupied on any of its operands.
pub fn schedule_cycles(c: &Circuit) -> Vec<Cycle> {
    let mut frontier = vec![0usize; c.width()];
    let mut cycles: Vec<Cycle> = Vec::new();
    for (i, g) in c.gates().iter().enumerate() {
        let layer = g.qubits().iter().map(|&q| frontier[q]).max().unwrap_or(0);
        for &q in g.qubits() {
            frontier[q] = layer + 1;
        }
        if layer == cycles.len() {
            cycles.push(Cycle {
                index: layer,
                gate_indices: Vec::new(),
                gates: Vec::new(),
            });
        }
        cycles[layer].gate_indices.push(i);
        cycles[layer].gates.push(g.clone());
    }
    cycles
}

/// Resource summary consumed by the fidelity models.
///
/// `m` (= `depth`) is the ASAP cycle count and `p1`/`p2` are the mean number
/// of one- and two-qubit gates per cycle, `n_i / m`. Metrics built from bare
/// gate counts have `m = 0` and cannot feed the cyclic model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub width: usize,
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub depth: usize,
    pub p1: f64,
    pub p2: f64,
}

impl CircuitMetrics {
    /// Counts-only metrics, with no schedule information.
    pub fn from_counts(n1: usize, n2: usize) -> Self {
        CircuitMetrics {
            width: 0,
            n1,
            n2,
            m: 0,
            depth: 0,
            p1: 0.0,
            p2: 0.0,
        }
    }

    /// Metrics with an explicit cycle count; parallelism follows as `n_i / m`.
    pub fn with_cycles(width: usize, n1: usize, n2: usize, m: usize) -> Self {
        let (p1, p2) = if m == 0 {
            (0.0, 0.0)
        } else {
            (n1 as f64 / m as f64, n2 as f64 / m as f64)
        };
        CircuitMetrics {
            width,
            n1,
            n2,
            m,
            depth: m,
            p1,
            p2,
        }
    }

    pub fn has_schedule(&self) -> bool {
        self.m > 0 || self.n1 + self.n2 == 0
    }

    pub fn gate_total(&self) -> usize {
        self.n1 + self.n2
    }
}

pub fn compute_metrics(c: &Circuit) -> CircuitMetrics {
    let counts = gate_counts(c);
    let m = schedule_cycles(c).len();
    CircuitMetrics::with_cycles(c.width(), counts.n1, counts.n2, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    fn u3(q: usize) -> Gate {
        Gate::u3(q, 0.3, 0.2, 0.1)
    }

    #[test]
    fn counts_examples() {
        let empty = Circuit::new(2);
        assert_eq!(gate_counts(&empty), GateCounts::default());

        let c = Circuit::from_gates(2, vec![Gate::cx(0, 1), u3(0), u3(1), Gate::cx(0, 1)]).unwrap();
        let counts = gate_counts(&c);
        assert_eq!((counts.n1, counts.n2), (2, 2));
        assert_eq!(counts.by_name.get("CNOT"), Some(&2));
        assert_eq!(counts.by_name.get("U3"), Some(&2));
        assert_eq!(counts.by_name.values().sum::<usize>(), c.len());
    }

    #[test]
    fn schedule_examples() {
        let c =
            Circuit::from_gates(4, vec![Gate::cx(0, 1), Gate::cx(2, 3), Gate::cx(1, 2)]).unwrap();
        let cycles = schedule_cycles(&c);
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0].gates, vec![Gate::cx(0, 1), Gate::cx(2, 3)]);
        assert_eq!(cycles[1].gates, vec![Gate::cx(1, 2)]);

        let serial = Circuit::from_gates(1, vec![u3(0), u3(0), u3(0)]).unwrap();
        let cycles = schedule_cycles(&serial);
        assert_eq!(cycles.len(), 3);
        assert!(cycles.iter().all(|c| c.gates.len() == 1));

        assert!(schedule_cycles(&Circuit::new(3)).is_empty());
    }

    #[test]
    fn metrics_examples() {
        let c =
            Circuit::from_gates(4, vec![Gate::cx(0, 1), Gate::cx(2, 3), Gate::cx(1, 2)]).unwrap();
        let m = compute_metrics(&c);
        assert_eq!((m.n1, m.n2, m.m, m.depth), (0, 3, 2, 2));
        assert_eq!(m.p2, 1.5);
        assert_eq!(m.p1, 0.0);

        let empty = compute_metrics(&Circuit::new(5));
        assert_eq!(
            empty,
            CircuitMetrics {
                width: 5,
                n1: 0,
                n2: 0,
                m: 0,
                depth: 0,
                p1: 0.0,
                p2: 0.0
            }
        );

        let layer: Vec<Gate> = (0..5).map(|i| Gate::cx(2 * i, 2 * i + 1)).collect();
        let m = compute_metrics(&Circuit::from_gates(10, layer).unwrap());
        assert_eq!((m.n2, m.m, m.p2), (5, 1, 5.0));
    }

    #[test]
    fn mixed_arity_cycles() {
        let c = Circuit::from_gates(
            3,
            vec![Gate::one(GateKind::H, 2), Gate::cx(0, 1), Gate::cx(1, 2)],
        )
        .unwrap();
        let cycles = schedule_cycles(&c);
        assert_eq!(cycles[0].gate_indices, vec![0, 1]);
        assert_eq!(cycles[1].gate_indices, vec![2]);
    }
}
