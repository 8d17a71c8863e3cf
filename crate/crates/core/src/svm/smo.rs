//! SMO for the soft-margin SVM dual
//!
//! ```text
//! min_α  ½ αᵀQα − eᵀα   s.t.  0 ≤ α ≤ C,  yᵀα = 0,   Q_ij = y_i y_j K_ij
//! ```
//!
//! Working pairs are the maximal KKT violators; the two-variable update and
//! the bias estimate follow LIBSVM.

const TAU: f64 = 1e-12;

/// Row-major symmetric kernel matrix over a sample set.
pub(crate) struct KernelMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl KernelMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    /// `∇f(α) = Qα − e` at the returned point.
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl Solution {
    /// Dual objective in maximization form, `eᵀα − ½ αᵀQα`.
    pub fn dual_objective(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.gradient)
            .map(|(a, g)| 0.5 * a * (1.0 - g))
            .sum()
    }
}

/// Solves the dual over the samples `idx` of `kernel` (labels `y` in ±1).
pub(crate) fn solve(
    kernel: &KernelMatrix,
    idx: &[usize],
    y: &[f64],
    c: f64,
    tol: f64,
    max_iterations: usize,
) -> Solution {
    let n = idx.len();
    let k = |a: usize, b: usize| kernel.get(idx[a], idx[b]);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let mut converged = false;

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    while iterations < max_iterations {
        let mut i = None;
        let mut gmax = f64::NEG_INFINITY;
        let mut j = None;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = Some(t);
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = Some(t);
            }
        }
        let (Some(i), Some(j)) = (i, j) else {
            converged = true;
            break;
        };
        if gmax - gmin < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (kii, kjj, kij) = (k(i, i), k(j, j), k(i, j));
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (kii + kjj + 2.0 * y[i] * y[j] * kij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (kii + kjj - 2.0 * y[i] * y[j] * kij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k(t, i) * di + y[j] * k(t, j) * dj);
        }
    }

    let rho = bias(&alpha, &grad, y, c);
    Solution {
        alpha,
        rho,
        gradient: grad,
        iterations,
        converged,
    }
}

fn bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum) = (0usize, 0.0);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else if lb.is_finite() {
        lb
    } else {
        0.0
    }
}
