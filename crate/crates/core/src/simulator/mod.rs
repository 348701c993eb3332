//! Noisy state-vector simulation for checking the digital fidelity model.
//!
//! Noise is per-gate depolarizing, unraveled into Pauli trajectories: after a
//! `k`-qubit gate, with probability `p_k·4^k/(4^k - 1)` a uniformly random
//! `k`-qubit Pauli (identity included) hits the operands. Averaged over
//! trajectories this is exactly the depolarizing channel with probability
//! `p_k`.

mod state;

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{gate_counts, Circuit, Gate};
use crate::exec::{map_indexed, Exec};
use crate::models;

pub use state::{ideal_state, StateVector};

pub const MAX_WIDTH: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("width {width} exceeds the simulator cap of {max} qubits")]
    WidthCap { width: usize, max: usize },
    #[error("{name} = {value} is not a valid depolarizing probability (need 0 <= p <= {max})")]
    Probability {
        name: &'static str,
        value: f64,
        max: f64,
    },
    #[error("{n_cnot} CNOTs do not fit in {depth} layers of width {width}")]
    Infeasible {
        n_cnot: usize,
        depth: usize,
        width: usize,
    },
    #[error("invalid argument: {0}")]
    Invalid(&'static str),
}

/// Depolarizing probabilities for 1- and 2-qubit gates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
}

impl NoiseParams {
    /// Each `p_k` must satisfy `p_k·4^k/(4^k - 1) <= 1` so that the trajectory
    /// unraveling is a probability.
    pub fn new(p1: f64, p2: f64) -> Result<Self, SimError> {
        for (name, p, k) in [("p1", p1, 1), ("p2", p2, 2)] {
            let max = (4f64.powi(k) - 1.0) / 4f64.powi(k);
            if !(0.0..=max).contains(&p) {
                return Err(SimError::Probability {
                    name,
                    value: p,
                    max,
                });
            }
        }
        Ok(NoiseParams { p1, p2 })
    }

    pub fn noiseless() -> Self {
        NoiseParams { p1: 0.0, p2: 0.0 }
    }

    /// Probability of drawing a Pauli (identity included) after a `k`-qubit gate.
    pub fn draw_probability(&self, k: usize) -> f64 {
        let p = if k == 1 { self.p1 } else { self.p2 };
        let d2 = 4f64.powi(k as i32);
        p * d2 / (d2 - 1.0)
    }
}

/// Converts a depolarizing probability into the gate fidelity fed to the
/// digital model.
///
/// `p` is the average gate infidelity, so the default is `f = 1 - p`. The
/// alternative reads `1 - p` as a process fidelity and converts it with the
/// local dimension of the gate; that figure ignores how an error spreads over
/// an entangled register and overestimates circuit fidelity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMapping {
    /// `f = 1 - p`.
    #[default]
    OneMinusP,
    /// `f = process_to_average(1 - p, k)`.
    ProcessToAverage,
}

impl FidelityMapping {
    pub fn gate_fidelity(self, p: f64, k: usize) -> f64 {
        match self {
            FidelityMapping::ProcessToAverage => {
                models::process_to_average(1.0 - p, k).expect("p in [0, 1]")
            }
            FidelityMapping::OneMinusP => 1.0 - p,
        }
    }
}

/// Digital-model fidelity `f1^n1 · f2^n2` of a circuit under `noise`.
pub fn model_fidelity(c: &Circuit, noise: NoiseParams, mapping: FidelityMapping) -> f64 {
    let counts = gate_counts(c);
    let (f1, f2) = (
        mapping.gate_fidelity(noise.p1, 1),
        mapping.gate_fidelity(noise.p2, 2),
    );
    models::digital_from_counts(counts.n1, counts.n2, f1, f2)
        .expect("fidelities in range")
        .value
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelitySample {
    pub mean: f64,
    pub stderr: f64,
    pub trajectories: usize,
    pub seed: u64,
}

fn haar_u3(rng: &mut ChaCha8Rng, q: usize) -> Gate {
    let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
    let phi = 2.0 * PI * rng.random::<f64>();
    let lambda = 2.0 * PI * rng.random::<f64>();
    Gate::u3(q, theta, phi, lambda)
}

/// Random layered circuit with exactly `n_cnot` CNOTs and ASAP depth
/// `depth_target`.
///
/// Each of the `depth_target` layers covers every qubit: the layer's CNOTs
/// (spread as evenly as possible over layers) act on uniformly random
/// disjoint pairs, and every remaining qubit gets a Haar-random U3.
pub fn random_circuit(
    width: usize,
    n_cnot: usize,
    depth_target: usize,
    seed: u64,
) -> Result<Circuit, SimError> {
    if width < 2 {
        return Err(SimError::Invalid("width must be at least 2"));
    }
    if depth_target < 1 {
        return Err(SimError::Invalid("depth must be at least 1"));
    }
    if n_cnot > (width / 2) * depth_target {
        return Err(SimError::Infeasible {
            n_cnot,
            depth: depth_target,
            width,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(width);
    let (base, extra) = (n_cnot / depth_target, n_cnot % depth_target);
    let mut order: Vec<usize> = (0..width).collect();
    for layer in 0..depth_target {
        let k = base + usize::from(layer < extra);
        for i in (1..width).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let mut gates: Vec<Gate> = Vec::with_capacity(width);
        for p in 0..k {
            gates.push(Gate::cx(order[2 * p], order[2 * p + 1]));
        }
        for &q in &order[2 * k..] {
            gates.push(haar_u3(&mut rng, q));
        }
        gates.sort_by_key(|g| g.qubits()[0]);
        for g in gates {
            c.push(g).expect("qubits are in range");
        }
    }
    Ok(c)
}

fn trajectory(c: &Circuit, ideal: &StateVector, noise: NoiseParams, seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let (q1, q2) = (noise.draw_probability(1), noise.draw_probability(2));
    let errors: Vec<usize> = c
        .gates()
        .iter()
        .map(|g| {
            let (q, n) = if g.arity() == 1 { (q1, 4) } else { (q2, 16) };
            if q > 0.0 && rng.random::<f64>() < q {
                rng.random_range(0..n)
            } else {
                0
            }
        })
        .collect();
    if errors.iter().all(|&e| e == 0) {
        return 1.0;
    }
    let mut s = StateVector::zero(c.width()).expect("width checked");
    for (g, &e) in c.gates().iter().zip(&errors) {
        s.apply_gate(g);
        if e != 0 {
            match g.qubits() {
                [q] => s.apply_pauli(*q, e),
                [a, b] => {
                    s.apply_pauli(*a, e / 4);
                    s.apply_pauli(*b, e % 4);
                }
                _ => unreachable!("gates act on one or two qubits"),
            }
        }
    }
    ideal.overlap(&s)
}

/// Mean state overlap with the ideal output over noisy trajectories.
///
/// Trajectory `t` draws from `ChaCha8Rng` seeded with `seed` on stream `t`, so
/// the result is bit-identical for any `exec`.
pub fn monte_carlo_fidelity_with(
    c: &Circuit,
    noise: NoiseParams,
    trajectories: usize,
    seed: u64,
    exec: Exec,
) -> Result<FidelitySample, SimError> {
    let noise = NoiseParams::new(noise.p1, noise.p2)?;
    if trajectories == 0 {
        return Err(SimError::Invalid("need at least one trajectory"));
    }
    let ideal = ideal_state(c)?;
    let samples = map_indexed(exec, trajectories, |t| {
        trajectory(c, &ideal, noise, seed, t as u64)
    });
    let n = trajectories as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let stderr = if trajectories > 1 {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(FidelitySample {
        mean: mean.clamp(0.0, 1.0),
        stderr,
        trajectories,
        seed,
    })
}

pub fn monte_carlo_fidelity(
    c: &Circuit,
    noise: NoiseParams,
    trajectories: usize,
    seed: u64,
) -> Result<FidelitySample, SimError> {
    monte_carlo_fidelity_with(c, noise, trajectories, seed, Exec::default())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_cnot: usize,
    pub depth: usize,
    pub model_f: f64,
    pub mc_f: f64,
    pub stderr: f64,
    pub trajectories: usize,
    pub seed: u64,
}

/// One row per `(n_cnot, depth)` pair, CNOT count varying slowest. Row `r`
/// uses seed `seed + r` for both the circuit and its trajectories.
#[allow(clippy::too_many_arguments)]
pub fn validation_sweep(
    width: usize,
    cnots: &[usize],
    depths: &[usize],
    noise: NoiseParams,
    trajectories: usize,
    seed: u64,
    mapping: FidelityMapping,
    exec: Exec,
) -> Result<Vec<SweepRow>, SimError> {
    if cnots.is_empty() || depths.is_empty() {
        return Err(SimError::Invalid("sweep ranges must be non-empty"));
    }
    let mut rows = Vec::with_capacity(cnots.len() * depths.len());
    for &n_cnot in cnots {
        for &depth in depths {
            let row_seed = seed.wrapping_add(rows.len() as u64);
            let c = random_circuit(width, n_cnot, depth, row_seed)?;
            let mc = monte_carlo_fidelity_with(&c, noise, trajectories, row_seed, exec)?;
            rows.push(SweepRow {
                n_cnot,
                depth,
                model_f: model_fidelity(&c, noise, mapping),
                mc_f: mc.mean,
                stderr: mc.stderr,
                trajectories,
                seed: row_seed,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `n_cnot,depth,model_f,mc_f,stderr,trajectories,seed`.
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "n_cnot,depth,model_f,mc_f,stderr,trajectories,seed")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.n_cnot, r.depth, r.model_f, r.mc_f, r.stderr, r.trajectories, r.seed
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::compute_metrics;

    #[test]
    fn random_circuit_contract() {
        let c = random_circuit(2, 0, 1, 7).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.gates().iter().all(|g| g.arity() == 1));

        assert_eq!(
            random_circuit(5, 20, 15, 3).unwrap(),
            random_circuit(5, 20, 15, 3).unwrap()
        );
        let m = compute_metrics(&random_circuit(5, 20, 15, 3).unwrap());
        assert_eq!(m.n2, 20);
        assert!((14..=17).contains(&m.depth));

        assert_eq!(
            random_circuit(5, 31, 15, 3),
            Err(SimError::Infeasible {
                n_cnot: 31,
                depth: 15,
                width: 5
            })
        );
        assert!(random_circuit(1, 0, 1, 0).is_err());
    }

    #[test]
    fn noiseless_is_exact() {
        let c = random_circuit(4, 6, 5, 11).unwrap();
        let s = monte_carlo_fidelity(&c, NoiseParams::noiseless(), 50, 1).unwrap();
        assert_eq!((s.mean, s.stderr), (1.0, 0.0));
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseParams::new(0.75, 0.9375).is_ok());
        assert!(matches!(
            NoiseParams::new(0.8, 0.0),
            Err(SimError::Probability { name: "p1", .. })
        ));
        assert!(NoiseParams::new(0.0, -0.1).is_err());
        assert!((NoiseParams::new(0.0, 0.15).unwrap().draw_probability(2) - 0.16).abs() < 1e-15);
    }

    #[test]
    fn deterministic_across_execution() {
        let c = random_circuit(5, 10, 6, 2).unwrap();
        let noise = NoiseParams::new(0.01, 0.05).unwrap();
        let a = monte_carlo_fidelity_with(&c, noise, 300, 9, Exec::Sequential).unwrap();
        let b = monte_carlo_fidelity_with(&c, noise, 300, 9, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.mean < 1.0 && a.stderr > 0.0);
    }

    #[test]
    fn sweep_csv() {
        let noise = NoiseParams::new(1e-3, 1e-2).unwrap();
        let rows = validation_sweep(
            3,
            &[2],
            &[3],
            noise,
            20,
            5,
            FidelityMapping::default(),
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n_cnot,depth,model_f,mc_f,stderr,trajectories,seed\n2,3,"));
    }
}
