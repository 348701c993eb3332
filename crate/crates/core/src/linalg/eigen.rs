use super::LinalgError;

/// Cyclic Jacobi eigensolver for a real symmetric `n x n` matrix (row-major).
///
/// Returns `(eigenvalues, vectors)` where column `k` of the row-major `vectors`
/// is the eigenvector for `eigenvalues[k]`. The vectors form an orthogonal
/// matrix.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    assert_eq!(a.len(), n * n);
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        if off.sqrt() <= 1e-14 * scale {
            let vals = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((vals, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_matrix() {
        let a = [
            4.0, 1.0, -2.0, 0.5, 1.0, 3.0, 0.0, 0.25, -2.0, 0.0, 1.0, 1.5, 0.5, 0.25, 1.5, -1.0,
        ];
        let (vals, v) = symmetric_eigen(&a, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let r: f64 = (0..4).map(|k| v[i * 4 + k] * vals[k] * v[j * 4 + k]).sum();
                assert!((r - a[i * 4 + j]).abs() < 1e-12);
                let o: f64 = (0..4).map(|k| v[k * 4 + i] * v[k * 4 + j]).sum();
                assert!((o - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let (mut vals, _) = symmetric_eigen(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals, vec![1.0, 1.0]);
    }
}
