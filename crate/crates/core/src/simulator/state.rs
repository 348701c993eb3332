use super::{SimError, MAX_WIDTH};
use crate::circuit::{Circuit, Gate};
use crate::linalg::{apply_1q, gate_unitary, C64};

/// Pure state of up to [`MAX_WIDTH`] qubits; qubit 0 is the most
/// significant bit of the amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<C64>,
}

const PAULI: [[C64; 4]; 3] = [
    [
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    ],
    [
        C64::new(0.0, 0.0),
        C64::new(0.0, -1.0),
        C64::new(0.0, 1.0),
        C64::new(0.0, 0.0),
    ],
    [
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(-1.0, 0.0),
    ],
];

impl StateVector {
    /// `|0...0>` on `width` qubits.
    pub fn zero(width: usize) -> Result<Self, SimError> {
        if width > MAX_WIDTH {
            return Err(SimError::WidthCap {
                width,
                max: MAX_WIDTH,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << width];
        amps[0] = C64::new(1.0, 0.0);
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        gate_unitary(g).apply(&mut self.amps, self.width, g.qubits());
    }

    /// Applies Pauli `p` (0 = I, 1 = X, 2 = Y, 3 = Z) to qubit `q`.
    pub fn apply_pauli(&mut self, q: usize, p: usize) {
        if p != 0 {
            apply_1q(&mut self.amps, self.width, q, &PAULI[p - 1]);
        }
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        assert_eq!(self.width, other.width, "width mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm_sqr()
    }
}

/// `U_c |0...0>`.
pub fn ideal_state(c: &Circuit) -> Result<StateVector, SimError> {
    let mut s = StateVector::zero(c.width())?;
    for g in c.gates() {
        s.apply_gate(g);
    }
    Ok(s)
}
