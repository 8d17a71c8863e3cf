use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::smo::KernelMatrix;
use super::{kernel_matrix, train_on_kernel, BinarySvmModel, KernelParams, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::spectra::FeatureType;

/// Z-score scaling fitted on a training split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Columns with zero spread keep a unit divisor.
    pub fn fit(xs: &[Vec<f64>]) -> Self {
        let dim = xs.first().map_or(0, Vec::len);
        let n = xs.len().max(1) as f64;
        let mean: Vec<f64> = (0..dim)
            .map(|d| xs.iter().map(|x| x[d]).sum::<f64>() / n)
            .collect();
        let std = (0..dim)
            .map(|d| {
                let var = xs.iter().map(|x| (x[d] - mean[d]).powi(2)).sum::<f64>() / n;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// Binary machine for classes `(first, second)`; positive decisions vote `first`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    pub first: u32,
    pub second: u32,
    pub model: BinarySvmModel,
}

/// One binary machine per unordered class pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OvoModel {
    /// Ascending class labels.
    pub classes: Vec<u32>,
    pub pairs: Vec<PairModel>,
    pub params: KernelParams,
    /// Feature length the model expects.
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_type: Option<FeatureType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<Scaler>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: u32,
    /// Position of `label` in [`OvoModel::classes`].
    pub class_index: usize,
    /// Votes per class, aligned with [`OvoModel::classes`].
    pub votes: Vec<usize>,
}

pub(crate) fn check_classes(xs: &[Vec<f64>], ys: &[u32]) -> Result<Vec<u32>> {
    if xs.len() != ys.len() {
        return Err(Error::Contract(format!(
            "{} samples but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    let classes: Vec<u32> = ys
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if classes.len() < 2 {
        return Err(Error::Training(format!(
            "one-vs-one needs at least 2 classes, got {}",
            classes.len()
        )));
    }
    let dim = xs[0].len();
    if dim == 0 || xs.iter().any(|x| x.len() != dim) {
        return Err(Error::Contract(
            "samples must share a nonzero dimension".into(),
        ));
    }
    Ok(classes)
}

/// Trains `k(k−1)/2` binary machines, each on its pair's samples only.
pub fn train_ovo(xs: &[Vec<f64>], ys: &[u32], params: KernelParams) -> Result<OvoModel> {
    train_ovo_scaled(xs, ys, params, false)
}

/// As [`train_ovo`], optionally z-scoring features with statistics from `xs`.
pub fn train_ovo_scaled(
    xs: &[Vec<f64>],
    ys: &[u32],
    params: KernelParams,
    scale: bool,
) -> Result<OvoModel> {
    let classes = check_classes(xs, ys)?;
    let scaler = scale.then(|| Scaler::fit(xs));
    let scaled: Vec<Vec<f64>>;
    let xs = match &scaler {
        Some(s) => {
            scaled = xs.iter().map(|x| s.apply(x)).collect();
            &scaled
        }
        None => xs,
    };
    let kernel = kernel_matrix(xs, params.gamma);
    let mut model = train_with_kernel(&kernel, xs, ys, &classes, params);
    model.scaler = scaler;
    Ok(model)
}

/// Trains every pair against a precomputed kernel over all of `xs`.
pub(crate) fn train_with_kernel(
    kernel: &KernelMatrix,
    xs: &[Vec<f64>],
    ys: &[u32],
    classes: &[u32],
    params: KernelParams,
) -> OvoModel {
    let mut pairs = Vec::with_capacity(classes.len() * (classes.len() - 1) / 2);
    for (a, &first) in classes.iter().enumerate() {
        for &second in &classes[a + 1..] {
            let mut idx = Vec::new();
            let mut labels = Vec::new();
            for (t, &y) in ys.iter().enumerate() {
                if y == first {
                    idx.push(t);
                    labels.push(1i8);
                } else if y == second {
                    idx.push(t);
                    labels.push(-1i8);
                }
            }
            let (model, _) = train_on_kernel(kernel, xs, &idx, &labels, params, DEFAULT_TOL);
            pairs.push(PairModel {
                first,
                second,
                model,
            });
        }
    }
    OvoModel {
        classes: classes.to_vec(),
        pairs,
        params,
        n: xs[0].len(),
        feature_type: None,
        scaler: None,
    }
}

impl OvoModel {
    /// Checks the pair table against the class list and every support
    /// vector against the declared feature length.
    pub fn validate(&self) -> Result<()> {
        let k = self.classes.len();
        if k < 2 || self.classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Contract(
                "classes must be >= 2 ascending labels".into(),
            ));
        }
        let mut expected = Vec::new();
        for (a, &first) in self.classes.iter().enumerate() {
            for &second in &self.classes[a + 1..] {
                expected.push((first, second));
            }
        }
        let got: Vec<(u32, u32)> = self.pairs.iter().map(|p| (p.first, p.second)).collect();
        if got != expected {
            return Err(Error::Contract(format!(
                "expected {} pair models in class order, found {}",
                expected.len(),
                got.len()
            )));
        }
        for p in &self.pairs {
            if p.model.support_vectors.len() != p.model.dual_coef.len() {
                return Err(Error::Contract(
                    "support vector / coefficient count mismatch".into(),
                ));
            }
            if let Some(sv) = p.model.support_vectors.iter().find(|sv| sv.len() != self.n) {
                return Err(Error::Contract(format!(
                    "pair ({}, {}) holds a {}-dimensional support vector, model declares n = {}",
                    p.first,
                    p.second,
                    sv.len(),
                    self.n
                )));
            }
        }
        if let Some(s) = &self.scaler {
            if s.mean.len() != self.n || s.std.len() != self.n {
                return Err(Error::Contract("scaler length differs from n".into()));
            }
        }
        Ok(())
    }
}

/// Majority vote over all pair machines.
///
/// Ties go to the tied class with the largest summed `|f(x)|` over the
/// comparisons it won, then to the lowest class index.
pub fn predict(m: &OvoModel, x: &[f64]) -> Result<Prediction> {
    if x.len() != m.n {
        return Err(Error::Contract(format!(
            "feature length {} does not match model length {}",
            x.len(),
            m.n
        )));
    }
    let scaled;
    let x = match &m.scaler {
        Some(s) => {
            scaled = s.apply(x);
            &scaled[..]
        }
        None => x,
    };
    let index_of = |label: u32| m.classes.binary_search(&label).ok();
    let mut votes = vec![0usize; m.classes.len()];
    let mut strength = vec![0.0f64; m.classes.len()];
    for p in &m.pairs {
        let f = p.model.decision(x);
        let winner = if f >= 0.0 { p.first } else { p.second };
        let w = index_of(winner)
            .ok_or_else(|| Error::Contract(format!("pair references unknown class {winner}")))?;
        votes[w] += 1;
        strength[w] += f.abs();
    }
    let top = *votes.iter().max().unwrap_or(&0);
    let class_index = (0..votes.len())
        .filter(|&c| votes[c] == top)
        .fold(None, |best: Option<usize>, c| match best {
            Some(b) if strength[b] >= strength[c] => Some(b),
            _ => Some(c),
        })
        .unwrap_or(0);
    Ok(Prediction {
        label: m.classes[class_index],
        class_index,
        votes,
    })
}
