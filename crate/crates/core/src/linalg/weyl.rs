use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{symmetric_eigen, LinalgError, UnitaryMatrix, C64, UNITARITY_TOL};

/// Canonical coordinates of a 2-qubit unitary, in units of π.
///
/// Always inside the chamber `1/2 >= c1 >= c2 >= c3 >= 0`. Mirror images
/// (`c3 -> -c3`) share a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylPoint {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl WeylPoint {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        WeylPoint { c1, c2, c3 }
    }

    pub fn max_abs_diff(&self, other: &WeylPoint) -> f64 {
        (self.c1 - other.c1)
            .abs()
            .max((self.c2 - other.c2).abs())
            .max((self.c3 - other.c3).abs())
    }

    pub fn approx_eq(&self, other: &WeylPoint, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

fn magic_basis() -> UnitaryMatrix {
    let (o, r, i) = (
        C64::new(0.0, 0.0),
        C64::new(FRAC_1_SQRT_2, 0.0),
        C64::new(0.0, FRAC_1_SQRT_2),
    );
    UnitaryMatrix::from_rows([[r, o, o, i], [o, i, r, o], [o, i, -r, o], [r, o, o, -i]])
}

const MIX: [f64; 6] = [
    0.618_033_988_7,
    1.0,
    2.695_172_43,
    -0.414_213_562_4,
    7.389_056_1,
    -3.127_408_91,
];

/// Eigenvalues of a symmetric unitary `G`, via a real orthogonal
/// diagonalization of `Re G + t Im G` (the two parts commute).
fn symmetric_unitary_eigenvalues(g: &UnitaryMatrix) -> Result<[C64; 4], LinalgError> {
    let mut best: Option<(f64, [C64; 4])> = None;
    for t in MIX {
        let s: Vec<f64> = g.data().iter().map(|z| z.re + t * z.im).collect();
        let (_, p) = symmetric_eigen(&s, 4)?;
        let mut d = [[C64::new(0.0, 0.0); 4]; 4];
        for (a, row) in d.iter_mut().enumerate() {
            for (b, out) in row.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..4 {
                    for j in 0..4 {
                        acc += p[i * 4 + a] * g[(i, j)] * p[j * 4 + b];
                    }
                }
                *out = acc;
            }
        }
        let off = (0..4).flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b)));
        let err = off.map(|(a, b)| d[a][b].norm()).fold(0.0, f64::max);
        let vals = [d[0][0], d[1][1], d[2][2], d[3][3]];
        if best.is_none_or(|(e, _)| err < e) {
            best = Some((err, vals));
        }
        if err < 1e-12 {
            break;
        }
    }
    match best {
        Some((err, vals)) if err < 1e-8 => Ok(vals),
        _ => Err(LinalgError::NoConvergence),
    }
}

fn fold(x: f64) -> f64 {
    let r = x.rem_euclid(FRAC_PI_2);
    let r = if r > FRAC_PI_4 { FRAC_PI_2 - r } else { r };
    (2.0 * r / PI).clamp(0.0, 0.5)
}

/// Weyl-chamber coordinates of a 4x4 unitary by the magic-basis method.
///
/// The result is unchanged by global phase and by 1-qubit gates on either
/// side of `u`.
pub fn weyl_coordinates(u: &UnitaryMatrix) -> Result<WeylPoint, LinalgError> {
    if u.dim() != 4 {
        return Err(LinalgError::DimensionMismatch {
            expected: 4,
            found: u.dim(),
        });
    }
    let dev = u.unitarity_error();
    if dev > UNITARITY_TOL {
        return Err(LinalgError::NotUnitary(dev));
    }
    let det = u.det();
    let su = u.scale(det.powf(-0.25));
    let b = magic_basis();
    let m = b.adjoint().mul(&su).mul(&b);
    let g = m.transpose().mul(&m);
    let eig = symmetric_unitary_eigenvalues(&g)?;

    let mut lam: Vec<f64> = eig
        .iter()
        .map(|z| z.arg().rem_euclid(2.0 * PI) / 2.0)
        .collect();
    lam.sort_by(|x, y| y.total_cmp(x));
    let raw = [
        (lam[0] + lam[1]) / 2.0,
        (lam[1] + lam[3]) / 2.0,
        (lam[0] + lam[3]) / 2.0,
    ];
    let mut c = raw.map(fold);
    c.sort_by(|x, y| y.total_cmp(x));
    Ok(WeylPoint::new(c[0], c[1], c[2]))
}

/// One output row: a block's id, its (ascending) qubits and coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylRow {
    pub block_id: usize,
    pub qubits: Vec<usize>,
    pub point: WeylPoint,
}

pub(crate) fn format_sig(x: f64, digits: i32) -> String {
    if x.abs() < 1e-300 || !x.is_finite() {
        return if x.is_finite() {
            "0".to_string()
        } else {
            x.to_string()
        };
    }
    let e = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - e).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Writes `block_id,qubits,c1,c2,c3` rows; qubits are space separated and
/// coordinates carry 12 significant digits.
pub fn write_weyl_csv<W: Write>(mut w: W, rows: &[WeylRow]) -> std::io::Result<()> {
    writeln!(w, "block_id,qubits,c1,c2,c3")?;
    for r in rows {
        let qubits: Vec<String> = r.qubits.iter().map(|q| q.to_string()).collect();
        let coord = |x: f64| format_sig(if x.abs() < 1e-12 { 0.0 } else { x }, 12);
        writeln!(
            w,
            "{},{},{},{},{}",
            r.block_id,
            qubits.join(" "),
            coord(r.point.c1),
            coord(r.point.c2),
            coord(r.point.c3)
        )?;
    }
    Ok(())
}
