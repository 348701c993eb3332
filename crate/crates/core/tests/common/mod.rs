#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use qroofline::circuit::{parse_qasm, Circuit, Gate, GateKind};
use qroofline::linalg::{gate_unitary, UnitaryMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn load_qasm(name: &str) -> Circuit {
    let text = std::fs::read_to_string(data(name)).unwrap();
    parse_qasm(&text).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Any supported gate on random distinct operands with random angles.
pub fn random_gate(rng: &mut ChaCha8Rng, width: usize) -> Gate {
    loop {
        let kind = GateKind::ALL[rng.random_range(0..GateKind::ALL.len())];
        if kind.arity() > width {
            continue;
        }
        let a = rng.random_range(0..width);
        let qubits = if kind.arity() == 1 {
            vec![a]
        } else {
            let mut b = rng.random_range(0..width - 1);
            if b >= a {
                b += 1;
            }
            vec![a, b]
        };
        let params = (0..kind.param_count())
            .map(|_| rng.random_range(-PI..PI))
            .collect();
        return Gate::new(kind, qubits, params).unwrap();
    }
}

pub fn random_circuit(rng: &mut ChaCha8Rng, width: usize, len: usize) -> Circuit {
    Circuit::from_gates(width, (0..len).map(|_| random_gate(rng, width)).collect()).unwrap()
}

pub fn random_1q(rng: &mut ChaCha8Rng) -> UnitaryMatrix {
    let g = Gate::u3(
        0,
        rng.random_range(0.0..PI),
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
    );
    let phase = C64::from_polar(1.0, rng.random_range(-PI..PI));
    gate_unitary(&g).scale(phase)
}

/// Embeds `m` (acting on `qubits`, first listed = most significant) into a
/// `width`-qubit register by direct index matching.
pub fn embed(m: &UnitaryMatrix, qubits: &[usize], width: usize) -> UnitaryMatrix {
    let dim = 1usize << width;
    let k = qubits.len();
    let sub = |idx: usize| -> usize {
        qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
            acc | (((idx >> (width - 1 - q)) & 1) << (k - 1 - pos))
        })
    };
    let mask: usize = qubits.iter().map(|&q| 1usize << (width - 1 - q)).sum();
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            if r & !mask == c & !mask {
                out[r * dim + c] = m[(sub(r), sub(c))];
            }
        }
    }
    UnitaryMatrix::new(dim, out).unwrap()
}

/// Full-register unitary as a product of embedded gate matrices.
pub fn unitary_by_embedding(c: &Circuit) -> UnitaryMatrix {
    let mut u = UnitaryMatrix::identity(1 << c.width());
    for g in c.gates() {
        u = embed(&gate_unitary(g), g.qubits(), c.width()).mul(&u);
    }
    u
}

/// Longest chain of gates sharing a qubit, by dynamic programming over the
/// dependency DAG.
pub fn longest_chain(gates: &[Gate]) -> usize {
    let mut best = vec![0usize; gates.len()];
    for j in 0..gates.len() {
        best[j] = 1;
        for i in 0..j {
            if gates[i]
                .qubits()
                .iter()
                .any(|q| gates[j].qubits().contains(q))
            {
                best[j] = best[j].max(best[i] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Density-matrix evolution with a Pauli channel after every gate: with
/// probability `p_k` one of the `4^k - 1` non-identity Paulis, uniformly, hits
/// the operands. Returns `<psi|rho|psi>` for the ideal output `psi`.
pub fn density_matrix_fidelity(c: &Circuit, p1: f64, p2: f64) -> f64 {
    let n = c.width();
    let dim = 1usize << n;
    let zero = C64::new(0.0, 0.0);
    let mut rho = vec![zero; dim * dim];
    rho[0] = C64::new(1.0, 0.0);
    let paulis: Vec<UnitaryMatrix> = (0..4).map(qroofline::linalg::pauli).collect();
    let mut psi = vec![zero; dim];
    psi[0] = C64::new(1.0, 0.0);
    for g in c.gates() {
        let u = embed(&gate_unitary(g), g.qubits(), n);
        rho = conj(&u, &rho, dim);
        psi = (0..dim)
            .map(|r| (0..dim).map(|k| u[(r, k)] * psi[k]).sum())
            .collect();
        let (p, k) = if g.arity() == 1 { (p1, 1) } else { (p2, 2) };
        let count = 4usize.pow(k as u32);
        let mut mixed = vec![zero; dim * dim];
        for idx in 1..count {
            let ops: Vec<usize> = if k == 1 {
                vec![idx]
            } else {
                vec![idx / 4, idx % 4]
            };
            let mut local = paulis[ops[0]].clone();
            for &o in &ops[1..] {
                local = local.kron(&paulis[o]);
            }
            let full = embed(&local, g.qubits(), n);
            let term = conj(&full, &rho, dim);
            for (m, t) in mixed.iter_mut().zip(term) {
                *m += t;
            }
        }
        let w = p / (count - 1) as f64;
        for (r, m) in rho.iter_mut().zip(mixed) {
            *r = *r * (1.0 - p) + m * w;
        }
    }
    let mut f = zero;
    for r in 0..dim {
        for k in 0..dim {
            f += psi[r].conj() * rho[r * dim + k] * psi[k];
        }
    }
    f.re
}

fn conj(u: &UnitaryMatrix, rho: &[C64], dim: usize) -> Vec<C64> {
    let mut tmp = vec![C64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            tmp[r * dim + c] = (0..dim).map(|k| u[(r, k)] * rho[k * dim + c]).sum();
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[r * dim + c] = (0..dim).map(|k| tmp[r * dim + k] * u[(c, k)].conj()).sum();
        }
    }
    out
}
