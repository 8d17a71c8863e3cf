//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use super::GraphMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix. `vectors[k]` belongs to `values[k]`;
/// neither is sorted.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    /// Largest `‖M v − λ v‖∞` over all pairs.
    pub fn max_residual(&self, m: &GraphMatrix) -> f64 {
        let n = m.order();
        let mut worst: f64 = 0.0;
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            for i in 0..n {
                let mv: f64 = (0..n).map(|j| m.get(i, j) * v[j]).sum();
                worst = worst.max((mv - lambda * v[i]).abs());
            }
        }
        worst
    }
}

/// Applies plane rotations in cyclic row order until the off-diagonal
/// Frobenius norm falls to `1e-12 · max|m_ij|`.
pub fn eigen_decompose(m: &GraphMatrix) -> EigenDecomposition {
    let n = m.order();
    let mut a = m.entries().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = 1e-12 * m.max_abs();

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
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
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values = (0..n).map(|i| a[i * n + i]).collect();
    let vectors = (0..n)
        .map(|col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    EigenDecomposition { values, vectors }
}
