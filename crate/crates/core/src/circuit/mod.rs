//! Circuit representation and resource analysis.
//!
//! A [`Circuit`] is an ordered gate list over a fixed register. Everything the
//! fidelity models consume (gate counts, ASAP cycle schedule, parallelism) is
//! derived here, together with the greedy block partitioners used for the
//! Weyl-chamber and block-size distributions.

mod blocks;
mod counts;
mod gate;
pub mod qasm;
mod schedule;

use thiserror::Error;

pub use blocks::{block_histogram, partition_3q_blocks, partition_max_2q_blocks, BlockSlice};
pub use counts::{
    normalized_counts, read_count_records_csv, read_count_records_json, write_count_records_csv,
    CountError, CountRecord, NormalizedCount,
};
pub use gate::{Gate, GateKind};
pub use qasm::{parse_qasm, to_qasm, QasmError};
pub use schedule::{
    compute_metrics, gate_counts, schedule_cycles, CircuitMetrics, Cycle, GateCounts,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("{gate} takes {expected} qubit operand(s), got {found}")]
    OperandCount {
        gate: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{gate} expects {expected} parameter(s), got {found}")]
    ParamCount {
        gate: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{gate} acts twice on qubit {qubit}")]
    RepeatedQubit { gate: &'static str, qubit: usize },
    #[error("{gate} has non-finite parameter {value}")]
    NonFiniteParam { gate: &'static str, value: f64 },
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(width);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(&q) = gate.qubits().iter().find(|&&q| q >= self.width) {
            return Err(CircuitError::QubitOutOfRange {
                qubit: q,
                width: self.width,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gates of `self` followed by gates of `other`, over the wider register.
    pub fn concat(&self, other: &Circuit) -> Circuit {
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Circuit {
            width: self.width.max(other.width),
            gates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_checks_width() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::cx(0, 1)).is_ok());
        assert_eq!(
            c.push(Gate::cx(0, 2)),
            Err(CircuitError::QubitOutOfRange { qubit: 2, width: 2 })
        );
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn empty_circuit_is_allowed() {
        let c = Circuit::from_gates(3, vec![]).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.width(), 3);
    }
}
