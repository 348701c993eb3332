use std::collections::BTreeMap;

use super::{Circuit, Gate};

/// A run of gates confined to a small qubit set.
///
/// `qubits` is sorted ascending. `gate_indices` point into the source circuit
/// and are ascending, so `gates` is the circuit restricted to this block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSlice {
    pub qubits: Vec<usize>,
    pub gate_indices: Vec<usize>,
    pub gates: Vec<Gate>,
}

impl BlockSlice {
    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.arity() == 2).count()
    }

    /// Block gates with operands renamed to local positions in `qubits`.
    pub fn local_gates(&self) -> Vec<Gate> {
        self.gates
            .iter()
            .map(|g| {
                g.remapped(|q| {
                    self.qubits
                        .iter()
                        .position(|&b| b == q)
                        .expect("gate inside block")
                })
            })
            .collect()
    }
}

struct Builder {
    qubits: Vec<usize>,
    gate_indices: Vec<usize>,
}

/// Greedy left-to-right partition into maximal 2-qubit blocks.
///
/// A 2-qubit gate extends the open block on exactly its pair; otherwise the
/// open blocks touching either operand are closed and a new block starts.
/// Single-qubit gates join the open block on their qubit, or wait for the next
/// block opened there. Leftover single-qubit gates become 1-qubit blocks at
/// the end. Multiplying block unitaries in emission order reproduces the
/// circuit unitary.
pub fn partition_max_2q_blocks(c: &Circuit) -> Vec<BlockSlice> {
    partition(c, 2)
}

/// Same greedy scan with blocks of up to 3 qubits. A 2-qubit gate joins an
/// open block containing both operands, or grows a 2-qubit block by a free
/// third qubit when no later block has already touched that qubit.
pub fn partition_3q_blocks(c: &Circuit) -> Vec<BlockSlice> {
    partition(c, 3)
}

/// Blocks per 2-qubit-gate count, over blocks with at least two qubits.
pub fn block_histogram(blocks: &[BlockSlice]) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for b in blocks.iter().filter(|b| b.qubits.len() >= 2) {
        *hist.entry(b.two_qubit_count()).or_default() += 1;
    }
    hist
}

fn partition(c: &Circuit, max_size: usize) -> Vec<BlockSlice> {
    let w = c.width();
    let mut blocks: Vec<Builder> = Vec::new();
    let mut open: Vec<Option<usize>> = vec![None; w];
    let mut last_block: Vec<Option<usize>> = vec![None; w];
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); w];

    for (i, g) in c.gates().iter().enumerate() {
        if g.arity() == 1 {
            let q = g.qubits()[0];
            match open[q] {
                Some(b) => blocks[b].gate_indices.push(i),
                None => pending[q].push(i),
            }
            continue;
        }
        let (a, b) = (g.qubits()[0], g.qubits()[1]);
        if open[a].is_some() && open[a] == open[b] {
            blocks[open[a].unwrap()].gate_indices.push(i);
            continue;
        }
        if max_size > 2 {
            let grow = match (open[a], open[b]) {
                (Some(k), None) => Some((k, b)),
                (None, Some(k)) => Some((k, a)),
                _ => None,
            };
            if let Some((k, extra)) = grow {
                let fits = blocks[k].qubits.len() < max_size;
                let ordered = last_block[extra].is_none_or(|l| l < k);
                if fits && ordered {
                    let blk = &mut blocks[k];
                    blk.qubits.push(extra);
                    blk.gate_indices.append(&mut pending[extra]);
                    blk.gate_indices.push(i);
                    open[extra] = Some(k);
                    last_block[extra] = Some(k);
                    continue;
                }
            }
        }
        for k in [open[a], open[b]].into_iter().flatten() {
            for &q in &blocks[k].qubits {
                open[q] = None;
            }
        }
        let k = blocks.len();
        let mut gate_indices = std::mem::take(&mut pending[a]);
        gate_indices.append(&mut pending[b]);
        gate_indices.push(i);
        blocks.push(Builder {
            qubits: vec![a, b],
            gate_indices,
        });
        for q in [a, b] {
            open[q] = Some(k);
            last_block[q] = Some(k);
        }
    }
    for (q, idx) in pending.into_iter().enumerate() {
        if !idx.is_empty() {
            blocks.push(Builder {
                qubits: vec![q],
                gate_indices: idx,
            });
        }
    }

    blocks
        .into_iter()
        .map(|mut b| {
            b.qubits.sort_unstable();
            b.gate_indices.sort_unstable();
            let gates = b
                .gate_indices
                .iter()
                .map(|&i| c.gates()[i].clone())
                .collect();
            BlockSlice {
                qubits: b.qubits,
                gate_indices: b.gate_indices,
                gates,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    fn u3(q: usize) -> Gate {
        Gate::u3(q, 0.4, 0.1, -0.2)
    }

    fn covers_every_gate_once(c: &Circuit, blocks: &[BlockSlice]) {
        let mut all: Vec<usize> = blocks.iter().flat_map(|b| b.gate_indices.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..c.len()).collect::<Vec<_>>());
        for b in blocks {
            for g in &b.gates {
                assert!(g.qubits().iter().all(|q| b.qubits.contains(q)));
            }
        }
    }

    #[test]
    fn pair_runs_merge() {
        let c = Circuit::from_gates(2, vec![Gate::cx(0, 1), u3(0), Gate::cx(0, 1)]).unwrap();
        let blocks = partition_max_2q_blocks(&c);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].qubits, vec![0, 1]);
        assert_eq!(blocks[0].gates.len(), 3);
    }

    #[test]
    fn alternating_pairs_split() {
        let c =
            Circuit::from_gates(3, vec![Gate::cx(0, 1), Gate::cx(1, 2), Gate::cx(0, 1)]).unwrap();
        let blocks = partition_max_2q_blocks(&c);
        let sets: Vec<_> = blocks.iter().map(|b| b.qubits.clone()).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![1, 2], vec![0, 1]]);
        covers_every_gate_once(&c, &blocks);
    }

    #[test]
    fn pending_single_qubit_gates_attach_forward() {
        let c = Circuit::from_gates(3, vec![u3(2), Gate::cx(0, 1), u3(2), Gate::cx(1, 2), u3(0)])
            .unwrap();
        let blocks = partition_max_2q_blocks(&c);
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[1].qubits, vec![1, 2]);
        assert_eq!(blocks[1].gate_indices, vec![0, 2, 3]);
        assert_eq!(blocks[2].qubits, vec![0]);
        covers_every_gate_once(&c, &blocks);
    }

    #[test]
    fn three_qubit_blocks() {
        let c = Circuit::from_gates(3, vec![Gate::cx(0, 1), Gate::cx(1, 2)]).unwrap();
        let blocks = partition_3q_blocks(&c);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].qubits, vec![0, 1, 2]);
        assert_eq!(blocks[0].two_qubit_count(), 2);

        let c = Circuit::from_gates(4, vec![Gate::cx(0, 1), Gate::cx(2, 3)]).unwrap();
        assert_eq!(partition_3q_blocks(&c).len(), 2);
    }

    #[test]
    fn growth_respects_later_blocks() {
        // {0,1} opens, {2,3} grows to {2,3,4}, 2 leaves for {2,5}; qubit 3 was
        // touched by a later block so {0,1} may not absorb it.
        let c = Circuit::from_gates(
            6,
            vec![
                Gate::cx(0, 1),
                Gate::cx(2, 3),
                Gate::cx(3, 4),
                Gate::cx(2, 5),
                Gate::cx(1, 3),
            ],
        )
        .unwrap();
        let blocks = partition_3q_blocks(&c);
        covers_every_gate_once(&c, &blocks);
        assert_eq!(blocks[0].qubits, vec![0, 1]);
        assert_eq!(blocks.last().unwrap().qubits, vec![1, 3]);
    }

    #[test]
    fn histogram_counts_two_qubit_gates() {
        let c = Circuit::from_gates(
            4,
            vec![
                Gate::cx(0, 1),
                Gate::cx(1, 2),
                Gate::cx(0, 2),
                Gate::two(GateKind::Cz, 3, 0),
                u3(3),
            ],
        )
        .unwrap();
        let blocks = partition_3q_blocks(&c);
        let hist = block_histogram(&blocks);
        assert_eq!(
            hist.values().sum::<usize>(),
            blocks.iter().filter(|b| b.qubits.len() > 1).count()
        );
        assert_eq!(hist.iter().map(|(k, v)| k * v).sum::<usize>(), 4);
    }
}
