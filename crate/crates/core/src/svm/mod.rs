//! Support vector classification: RBF kernel, SMO-trained binary machines,
//! one-vs-one voting and validation-set grid search.

mod grid;
mod ovo;
mod smo;

pub use grid::{default_grid, grid_search, GridBase, GridResult};
pub use ovo::{predict, train_ovo, train_ovo_scaled, OvoModel, PairModel, Prediction, Scaler};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::FeatureType;
use smo::KernelMatrix;

/// Default KKT tolerance for SMO.
pub const DEFAULT_TOL: f64 = 1e-3;
/// Iteration budget, in passes over the training set.
pub const MAX_PASSES: usize = 10_000;

/// RBF SVM meta-parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Misclassification cost.
    #[serde(rename = "C")]
    pub c: f64,
    pub gamma: f64,
}

impl KernelParams {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("C must be > 0, got {c}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Parameter(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(Self { c, gamma })
    }

    /// Published reference meta-parameters for each feature type.
    pub fn reported(ft: FeatureType) -> Self {
        match ft {
            FeatureType::FT1 => Self {
                c: 0.125,
                gamma: 0.001,
            },
            FeatureType::FT2 => Self {
                c: 0.031,
                gamma: 0.0004,
            },
            FeatureType::FT3 => Self {
                c: 0.001,
                gamma: 0.004,
            },
        }
    }
}

/// `exp(−γ‖x − y‖²)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Contract(format!(
            "kernel arguments differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(rbf(x, y, gamma))
}

pub(crate) fn rbf(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

pub(crate) fn kernel_matrix(xs: &[Vec<f64>], gamma: f64) -> KernelMatrix {
    let n = xs.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
        for j in i + 1..n {
            let v = rbf(&xs[i], &xs[j], gamma);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    KernelMatrix { n, data }
}

/// Two-class RBF machine, `f(x) = Σ αᵢyᵢ K(xᵢ, x) + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinarySvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `αᵢ yᵢ` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub params: KernelParams,
}

impl BinarySvmModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, coef)| coef * rbf(sv, x, self.params.gamma))
            .sum::<f64>()
            + self.bias
    }

    pub fn dimension(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }
}

/// Convergence details of one SMO run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainSummary {
    /// `α` for every training sample, in input order.
    pub alpha: Vec<f64>,
    /// `eᵀα − ½ αᵀQα`.
    pub dual_objective: f64,
    /// Maximal violating-pair gap `m(α) − M(α)` at exit.
    pub kkt_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn check_binary_inputs(xs: &[Vec<f64>], ys: &[i8]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Training("no training samples".into()));
    }
    if xs.len() != ys.len() {
        return Err(Error::Contract(format!(
            "{} samples but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    if let Some(y) = ys.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::Contract(format!(
            "binary labels must be ±1, got {y}"
        )));
    }
    let dim = xs[0].len();
    if xs.iter().any(|x| x.len() != dim) {
        return Err(Error::Contract("samples differ in dimension".into()));
    }
    if !(ys.contains(&1) && ys.contains(&-1)) {
        return Err(Error::Training("both classes must be present".into()));
    }
    Ok(())
}

/// Trains a binary RBF SVM with SMO.
pub fn train_binary(
    xs: &[Vec<f64>],
    ys: &[i8],
    params: KernelParams,
    tol: f64,
) -> Result<BinarySvmModel> {
    train_binary_detailed(xs, ys, params, tol).map(|(m, _)| m)
}

/// [`train_binary`] plus the solver's convergence details.
pub fn train_binary_detailed(
    xs: &[Vec<f64>],
    ys: &[i8],
    params: KernelParams,
    tol: f64,
) -> Result<(BinarySvmModel, TrainSummary)> {
    check_binary_inputs(xs, ys)?;
    let kernel = kernel_matrix(xs, params.gamma);
    let idx: Vec<usize> = (0..xs.len()).collect();
    Ok(train_on_kernel(&kernel, xs, &idx, ys, params, tol))
}

/// Shared by the one-vs-one trainer, which reuses one kernel matrix across
/// class pairs and cost values.
pub(crate) fn train_on_kernel(
    kernel: &KernelMatrix,
    xs: &[Vec<f64>],
    idx: &[usize],
    ys: &[i8],
    params: KernelParams,
    tol: f64,
) -> (BinarySvmModel, TrainSummary) {
    let y: Vec<f64> = ys.iter().map(|&v| v as f64).collect();
    let budget = MAX_PASSES.saturating_mul(idx.len().max(1));
    let sol = smo::solve(kernel, idx, &y, params.c, tol, budget);
    if !sol.converged {
        log::warn!(
            "SMO stopped after {} iterations without reaching tolerance {tol} (C = {}, gamma = {})",
            sol.iterations,
            params.c,
            params.gamma
        );
    }

    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for (t, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(xs[idx[t]].clone());
            dual_coef.push(a * y[t]);
        }
    }

    let (mut up, mut low) = (f64::NEG_INFINITY, f64::INFINITY);
    for ((&yt, &g), &a) in y.iter().zip(&sol.gradient).zip(&sol.alpha) {
        let v = -yt * g;
        if (yt > 0.0 && a < params.c) || (yt < 0.0 && a > 0.0) {
            up = up.max(v);
        }
        if (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < params.c) {
            low = low.min(v);
        }
    }
    let kkt_gap = if up.is_finite() && low.is_finite() {
        (up - low).max(0.0)
    } else {
        0.0
    };

    let summary = TrainSummary {
        dual_objective: sol.dual_objective(),
        kkt_gap,
        iterations: sol.iterations,
        converged: sol.converged,
        alpha: sol.alpha,
    };
    let model = BinarySvmModel {
        support_vectors,
        dual_coef,
        bias: -sol.rho,
        params,
    };
    (model, summary)
}
