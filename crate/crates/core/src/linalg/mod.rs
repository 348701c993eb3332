//! Dense complex matrices for small registers, gate definitions and
//! Weyl-chamber coordinates of 2-qubit unitaries.
//!
//! Bit convention everywhere: in a register of `n` qubits, qubit 0 is the most
//! significant bit of the basis-state index.

mod eigen;
mod gates;
mod weyl;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{BlockSlice, Gate};

pub use eigen::symmetric_eigen;
pub use gates::{canonical_gate, cnot_power, gate_matrix, gate_unitary, pauli};
pub use weyl::{weyl_coordinates, write_weyl_csv, WeylPoint, WeylRow};

pub type C64 = Complex64;

pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {found}")]
    EntryCount {
        dim: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected a {expected}x{expected} matrix, got {found}x{found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("eigenvalue solver did not converge")]
    NoConvergence,
}

/// Square row-major complex matrix of power-of-two dimension.
///
/// Every constructor in this crate yields a unitary matrix; data supplied by
/// callers through [`UnitaryMatrix::new`] is only shape-checked, so use
/// [`UnitaryMatrix::is_unitary`] before trusting it.
#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl UnitaryMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if !dim.is_power_of_two() {
            return Err(LinalgError::NotPowerOfTwo(dim));
        }
        if data.len() != dim * dim {
            return Err(LinalgError::EntryCount {
                dim,
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(UnitaryMatrix { dim, data })
    }

    pub(crate) fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        UnitaryMatrix { dim: N, data }
    }

    pub(crate) fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        UnitaryMatrix {
            dim: N,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "dimension must be a power of two");
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        UnitaryMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        UnitaryMatrix { dim: n, data: out }
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        let n = self.dim;
        let mut out = self.data.clone();
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j].conj();
            }
        }
        UnitaryMatrix { dim: n, data: out }
    }

    pub fn transpose(&self) -> UnitaryMatrix {
        let n = self.dim;
        let mut out = self.data.clone();
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j];
            }
        }
        UnitaryMatrix { dim: n, data: out }
    }

    /// Tensor product `self ⊗ rhs`; `self` acts on the more significant bits.
    pub fn kron(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        let (a, b) = (self.dim, rhs.dim);
        let n = a * b;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..a {
            for j in 0..a {
                let x = self.data[i * a + j];
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k) * n + j * b + l] = x * rhs.data[k * b + l];
                    }
                }
            }
        }
        UnitaryMatrix { dim: n, data: out }
    }

    pub fn scale(&self, s: C64) -> UnitaryMatrix {
        UnitaryMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[piv * n + col].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &UnitaryMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-entry deviation of `U·U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        self.mul(&self.adjoint())
            .max_abs_diff(&UnitaryMatrix::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Applies this matrix to the given qubits of an `n`-qubit state.
    /// `qubits[0]` is the most significant bit of the matrix index.
    pub fn apply(&self, state: &mut [C64], n: usize, qubits: &[usize]) {
        assert_eq!(
            1 << qubits.len(),
            self.dim,
            "operand count does not match matrix dimension"
        );
        match qubits.len() {
            1 => apply_1q(
                state,
                n,
                qubits[0],
                self.data.as_slice().try_into().unwrap(),
            ),
            2 => apply_2q(
                state,
                n,
                qubits[0],
                qubits[1],
                self.data.as_slice().try_into().unwrap(),
            ),
            _ => apply_kq(state, n, qubits, self),
        }
    }
}

impl Index<(usize, usize)> for UnitaryMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for UnitaryMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "UnitaryMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[inline]
fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

pub fn apply_1q(state: &mut [C64], n: usize, q: usize, m: &[C64; 4]) {
    debug_assert_eq!(state.len(), 1 << n);
    let b = bit(n, q);
    for i in 0..state.len() {
        if i & b != 0 {
            continue;
        }
        let (x, y) = (state[i], state[i | b]);
        state[i] = m[0] * x + m[1] * y;
        state[i | b] = m[2] * x + m[3] * y;
    }
}

/// `q0` selects the high bit of the 4x4 matrix index.
pub fn apply_2q(state: &mut [C64], n: usize, q0: usize, q1: usize, m: &[C64; 16]) {
    debug_assert_eq!(state.len(), 1 << n);
    let (b0, b1) = (bit(n, q0), bit(n, q1));
    for i in 0..state.len() {
        if i & (b0 | b1) != 0 {
            continue;
        }
        let idx = [i, i | b1, i | b0, i | b0 | b1];
        let v = idx.map(|k| state[k]);
        for (r, &k) in idx.iter().enumerate() {
            state[k] =
                m[4 * r] * v[0] + m[4 * r + 1] * v[1] + m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
        }
    }
}

fn apply_kq(state: &mut [C64], n: usize, qubits: &[usize], m: &UnitaryMatrix) {
    let k = qubits.len();
    let bits: Vec<usize> = qubits.iter().map(|&q| bit(n, q)).collect();
    let mask: usize = bits.iter().sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|local| {
            (0..k)
                .filter(|&j| local & (1 << (k - 1 - j)) != 0)
                .map(|j| bits[j])
                .sum()
        })
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); 1 << k];
    for i in 0..state.len() {
        if i & mask != 0 {
            continue;
        }
        for (slot, &o) in buf.iter_mut().zip(&offsets) {
            *slot = state[i | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            state[i | o] = (0..buf.len()).map(|c| m[(r, c)] * buf[c]).sum();
        }
    }
}

/// Product of the gate matrices embedded in a `width`-qubit register, later
/// gates multiplying on the left.
pub fn circuit_unitary(width: usize, gates: &[Gate]) -> UnitaryMatrix {
    let dim = 1usize << width;
    let mats: Vec<UnitaryMatrix> = gates.iter().map(gate_unitary).collect();
    let mut out = UnitaryMatrix::identity(dim);
    let mut col = vec![C64::new(0.0, 0.0); dim];
    for c in 0..dim {
        col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        col[c] = C64::new(1.0, 0.0);
        for (g, m) in gates.iter().zip(&mats) {
            m.apply(&mut col, width, g.qubits());
        }
        for r in 0..dim {
            out[(r, c)] = col[r];
        }
    }
    out
}

/// Unitary of a block acting on its own qubits, which are taken in ascending
/// order with the lowest index as the most significant bit.
pub fn block_unitary(b: &BlockSlice, dim: usize) -> Result<UnitaryMatrix, LinalgError> {
    let expected = 1usize << b.qubits.len();
    if dim != expected || !matches!(dim, 2 | 4 | 8) {
        return Err(LinalgError::DimensionMismatch {
            expected,
            found: dim,
        });
    }
    Ok(circuit_unitary(b.qubits.len(), &b.local_gates()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{partition_max_2q_blocks, Circuit, GateKind};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn determinant_and_kron() {
        let x = pauli(1);
        let z = pauli(3);
        assert!((x.det() - c(-1.0, 0.0)).norm() < 1e-15);
        let xz = x.kron(&z);
        assert_eq!(xz.dim(), 4);
        assert!((xz.det() - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(xz[(0, 2)], c(1.0, 0.0));
        assert_eq!(xz[(1, 3)], c(-1.0, 0.0));
        assert!(xz.is_unitary(UNITARITY_TOL));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(
            UnitaryMatrix::new(3, vec![c(0.0, 0.0); 9]),
            Err(LinalgError::NotPowerOfTwo(3))
        );
        assert!(matches!(
            UnitaryMatrix::new(2, vec![c(0.0, 0.0); 3]),
            Err(LinalgError::EntryCount { .. })
        ));
    }

    #[test]
    fn block_examples() {
        let c2 = Circuit::from_gates(2, vec![Gate::cx(0, 1), Gate::cx(0, 1)]).unwrap();
        let blocks = partition_max_2q_blocks(&c2);
        let u = block_unitary(&blocks[0], 4).unwrap();
        assert!(u.max_abs_diff(&UnitaryMatrix::identity(4)) < 1e-15);

        let g = Gate::u3(0, 0.7, 0.2, -1.1);
        let c1 = Circuit::from_gates(2, vec![g.clone(), Gate::cx(0, 1)]).unwrap();
        let blocks = partition_max_2q_blocks(&c1);
        let u = block_unitary(&blocks[0], 4).unwrap();
        let expected =
            gate_unitary(&Gate::cx(0, 1)).mul(&gate_unitary(&g).kron(&UnitaryMatrix::identity(2)));
        assert!(u.max_abs_diff(&expected) < 1e-14);

        let swap3 =
            Circuit::from_gates(2, vec![Gate::cx(0, 1), Gate::cx(1, 0), Gate::cx(0, 1)]).unwrap();
        let u = circuit_unitary(2, swap3.gates());
        assert!(u.max_abs_diff(&gate_unitary(&Gate::two(GateKind::Swap, 0, 1))) < 1e-15);

        assert_eq!(
            block_unitary(&blocks[0], 8),
            Err(LinalgError::DimensionMismatch {
                expected: 4,
                found: 8
            })
        );
    }

    #[test]
    fn three_qubit_kernel_matches_embedding() {
        // CNOT on (2, 0) inside 3 qubits, via the k-qubit path and via 2q path.
        let cx = gate_unitary(&Gate::cx(0, 1));
        let wide = cx.kron(&UnitaryMatrix::identity(2));
        let mut a: Vec<C64> = (0..8).map(|i| c(i as f64, 0.5 * i as f64)).collect();
        let mut b = a.clone();
        wide.apply(&mut a, 3, &[2, 0, 1]);
        cx.apply(&mut b, 3, &[2, 0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
