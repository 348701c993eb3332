use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use super::{UnitaryMatrix, C64};
use crate::circuit::{Gate, GateKind};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn cis(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

/// Pauli matrix by index: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub fn pauli(k: usize) -> UnitaryMatrix {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match k {
        0 => UnitaryMatrix::identity(2),
        1 => UnitaryMatrix::from_rows([[o, l], [l, o]]),
        2 => UnitaryMatrix::from_rows([[o, -i], [i, o]]),
        3 => UnitaryMatrix::from_rows([[l, o], [o, -l]]),
        _ => panic!("pauli index {k} out of range"),
    }
}

fn u3(theta: f64, phi: f64, lambda: f64) -> UnitaryMatrix {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    UnitaryMatrix::from_rows([
        [c(ct, 0.0), -cis(lambda) * st],
        [cis(phi) * st, cis(phi + lambda) * ct],
    ])
}

fn diag2(a: C64, b: C64) -> UnitaryMatrix {
    let o = c(0.0, 0.0);
    UnitaryMatrix::from_rows([[a, o], [o, b]])
}

fn diag4(d: [C64; 4]) -> UnitaryMatrix {
    let mut m = UnitaryMatrix::identity(4);
    for (k, z) in d.into_iter().enumerate() {
        m[(k, k)] = z;
    }
    m
}

fn fsim(theta: f64, phi: f64) -> UnitaryMatrix {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    let (ct, st) = (c(theta.cos(), 0.0), c(0.0, -theta.sin()));
    UnitaryMatrix::from_rows([
        [l, o, o, o],
        [o, ct, st, o],
        [o, st, ct, o],
        [o, o, o, cis(-phi)],
    ])
}

/// `exp(i (a XX + b YY + c ZZ))`, the canonical 2-qubit gate.
pub fn canonical_gate(a: f64, b: f64, cc: f64) -> UnitaryMatrix {
    let term = |p: usize, t: f64| {
        let pp = pauli(p).kron(&pauli(p));
        let mut m = pp.scale(c(0.0, t.sin()));
        for k in 0..4 {
            m[(k, k)] += c(t.cos(), 0.0);
        }
        m
    };
    term(1, a).mul(&term(2, b)).mul(&term(3, cc))
}

/// Controlled `X^t`, with `X^t = (I + X)/2 + e^{iπt} (I - X)/2`.
pub fn cnot_power(t: f64) -> UnitaryMatrix {
    let e = cis(PI * t);
    let (p, m) = ((c(1.0, 0.0) + e) / 2.0, (c(1.0, 0.0) - e) / 2.0);
    let mut u = UnitaryMatrix::identity(4);
    u[(2, 2)] = p;
    u[(2, 3)] = m;
    u[(3, 2)] = m;
    u[(3, 3)] = p;
    u
}

/// Matrix of a gate kind with the given parameters (2x2 or 4x4; for 2-qubit
/// gates the first operand is the high bit).
///
/// Panics if `params` has the wrong length; [`Gate`] values are validated on
/// construction so [`gate_unitary`] never does.
pub fn gate_matrix(kind: GateKind, params: &[f64]) -> UnitaryMatrix {
    use GateKind::*;
    assert_eq!(
        params.len(),
        kind.param_count(),
        "wrong parameter count for {}",
        kind.label()
    );
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let h = FRAC_1_SQRT_2;
    match kind {
        U3 => u3(params[0], params[1], params[2]),
        U2 => u3(FRAC_PI_2, params[0], params[1]),
        U1 => diag2(l, cis(params[0])),
        Rz => diag2(cis(-params[0] / 2.0), cis(params[0] / 2.0)),
        Rx => {
            let (ct, st) = ((params[0] / 2.0).cos(), (params[0] / 2.0).sin());
            UnitaryMatrix::from_rows([[c(ct, 0.0), c(0.0, -st)], [c(0.0, -st), c(ct, 0.0)]])
        }
        Ry => {
            let (ct, st) = ((params[0] / 2.0).cos(), (params[0] / 2.0).sin());
            UnitaryMatrix::from_real_rows([[ct, -st], [st, ct]])
        }
        Sx => UnitaryMatrix::from_rows([[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]),
        X => pauli(1),
        Y => pauli(2),
        Z => pauli(3),
        H => UnitaryMatrix::from_real_rows([[h, h], [h, -h]]),
        S => diag2(l, i),
        Sdg => diag2(l, -i),
        T => diag2(l, cis(FRAC_PI_4)),
        Tdg => diag2(l, cis(-FRAC_PI_4)),
        Id => UnitaryMatrix::identity(2),
        Cx => cnot_power(1.0).map_exact(),
        Cz => diag4([l, l, l, -l]),
        Swap => UnitaryMatrix::from_real_rows([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]),
        Rzz => {
            let (a, b) = (cis(-params[0] / 2.0), cis(params[0] / 2.0));
            diag4([a, b, b, a])
        }
        Rxx => {
            let (ct, st) = (
                c((params[0] / 2.0).cos(), 0.0),
                c(0.0, -(params[0] / 2.0).sin()),
            );
            UnitaryMatrix::from_rows([
                [ct, o, o, st],
                [o, ct, st, o],
                [o, st, ct, o],
                [st, o, o, ct],
            ])
        }
        ISwap => UnitaryMatrix::from_rows([[l, o, o, o], [o, o, i, o], [o, i, o, o], [o, o, o, l]]),
        SqrtISwap => {
            let (r, s) = (c(h, 0.0), c(0.0, h));
            UnitaryMatrix::from_rows([[l, o, o, o], [o, r, s, o], [o, s, r, o], [o, o, o, l]])
        }
        Ecr => {
            let (r, s) = (c(h, 0.0), c(0.0, h));
            UnitaryMatrix::from_rows([[o, o, r, s], [o, o, s, r], [r, -s, o, o], [-s, r, o, o]])
        }
        Syc => fsim(FRAC_PI_2, PI / 6.0),
        FSim => fsim(params[0], params[1]),
        B => canonical_gate(FRAC_PI_4, FRAC_PI_8, 0.0),
        Cx4rt => cnot_power(0.25),
        Cx8rt => cnot_power(0.125),
    }
}

pub fn gate_unitary(g: &Gate) -> UnitaryMatrix {
    gate_matrix(g.kind(), g.params())
}

impl UnitaryMatrix {
    /// Snaps entries within 1e-15 of 0 or 1 to the exact value.
    fn map_exact(mut self) -> Self {
        for z in self.data.iter_mut() {
            for part in [&mut z.re, &mut z.im] {
                if part.abs() < 1e-15 {
                    *part = 0.0;
                } else if (part.abs() - 1.0).abs() < 1e-15 {
                    *part = part.signum();
                }
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::UNITARITY_TOL;

    #[test]
    fn every_gate_is_unitary() {
        for kind in GateKind::ALL {
            let params: Vec<f64> = (0..kind.param_count())
                .map(|k| 0.3 + 0.7 * k as f64)
                .collect();
            let u = gate_matrix(kind, &params);
            assert_eq!(u.dim(), 1 << kind.arity());
            assert!(
                u.is_unitary(UNITARITY_TOL),
                "{kind:?} error {}",
                u.unitarity_error()
            );
        }
    }

    #[test]
    fn named_matrices() {
        let cx = gate_matrix(GateKind::Cx, &[]);
        let expected = UnitaryMatrix::from_real_rows([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        assert_eq!(cx, expected);
        assert!(
            gate_matrix(GateKind::U3, &[0.0, 0.0, 0.0]).max_abs_diff(&UnitaryMatrix::identity(2))
                == 0.0
        );

        let syc = gate_matrix(GateKind::Syc, &[]);
        assert!(syc.max_abs_diff(&gate_matrix(GateKind::FSim, &[FRAC_PI_2, PI / 6.0])) == 0.0);
        assert!((syc[(1, 2)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((syc[(3, 3)] - cis(-PI / 6.0)).norm() < 1e-15);
        assert!(syc[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn roots_compose() {
        let q = gate_matrix(GateKind::Cx4rt, &[]);
        let q4 = q.mul(&q).mul(&q).mul(&q);
        assert!(q4.max_abs_diff(&gate_matrix(GateKind::Cx, &[])) < 1e-14);
        let e = gate_matrix(GateKind::Cx8rt, &[]);
        assert!(e.mul(&e).max_abs_diff(&q) < 1e-14);
        let s = gate_matrix(GateKind::SqrtISwap, &[]);
        assert!(s.mul(&s).max_abs_diff(&gate_matrix(GateKind::ISwap, &[])) < 1e-14);
        let sx = gate_matrix(GateKind::Sx, &[]);
        assert!(sx.mul(&sx).max_abs_diff(&pauli(1)) < 1e-15);
    }

    #[test]
    fn rotations_agree() {
        let t = 0.83;
        let rz = gate_matrix(GateKind::Rz, &[t]);
        let u1 = gate_matrix(GateKind::U1, &[t]);
        assert!(rz.scale(cis(t / 2.0)).max_abs_diff(&u1) < 1e-15);
        let rzz = gate_matrix(GateKind::Rzz, &[t]);
        assert!(rzz.max_abs_diff(&canonical_gate(0.0, 0.0, -t / 2.0)) < 1e-15);
        let rxx = gate_matrix(GateKind::Rxx, &[t]);
        assert!(rxx.max_abs_diff(&canonical_gate(-t / 2.0, 0.0, 0.0)) < 1e-15);
    }
}
