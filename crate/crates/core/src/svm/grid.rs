use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ovo::{check_classes, predict, train_with_kernel, Scaler};
use super::{kernel_matrix, KernelParams};
use crate::error::{Error, Result};
use crate::eval::{confusion_from_labels, precision_recall_f};

/// Spacing of the default (C, γ) grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridBase {
    /// Powers of two, 2⁻¹⁰ … 2¹³.
    #[serde(rename = "2")]
    Two,
    /// Decades 10⁻³ … 10⁴ at three points per decade.
    #[default]
    #[serde(rename = "10")]
    Ten,
}

/// Logarithmic grid spanning roughly 0.001 – 10,000.
pub fn default_grid(base: GridBase) -> Vec<f64> {
    match base {
        GridBase::Two => (-10..=13).map(|k| 2f64.powi(k)).collect(),
        GridBase::Ten => (0..=21)
            .map(|k| 10f64.powf(-3.0 + k as f64 / 3.0))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub params: KernelParams,
    /// Validation macro F-measure of `params`.
    pub score: f64,
    /// Every evaluated cell as `(params, score)`, C-major.
    pub cells: Vec<(KernelParams, f64)>,
}

/// Trains one-vs-one models on the training split for every (C, γ) pair and
/// keeps the one with the best validation macro F-measure. Ties prefer the
/// smaller C, then the smaller γ.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    train_x: &[Vec<f64>],
    train_y: &[u32],
    val_x: &[Vec<f64>],
    val_y: &[u32],
    c_grid: &[f64],
    gamma_grid: &[f64],
    scale: bool,
) -> Result<GridResult> {
    if c_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::Parameter(
            "grid search needs nonempty C and gamma grids".into(),
        ));
    }
    if val_x.is_empty() || val_x.len() != val_y.len() {
        return Err(Error::Parameter(
            "grid search needs a nonempty validation set".into(),
        ));
    }
    for &v in c_grid.iter().chain(gamma_grid) {
        KernelParams::new(v, v)?;
    }
    let classes = check_classes(train_x, train_y)?;

    let scaler = scale.then(|| Scaler::fit(train_x));
    let train: Vec<Vec<f64>> = match &scaler {
        Some(s) => train_x.iter().map(|x| s.apply(x)).collect(),
        None => train_x.to_vec(),
    };

    let mut cells = Vec::with_capacity(c_grid.len() * gamma_grid.len());
    for &gamma in gamma_grid {
        let kernel = kernel_matrix(&train, gamma);
        let scores: Vec<Result<(KernelParams, f64)>> = c_grid
            .par_iter()
            .map(|&c| {
                let params = KernelParams { c, gamma };
                let mut model = train_with_kernel(&kernel, &train, train_y, &classes, params);
                model.scaler = scaler.clone();
                let mut preds = Vec::with_capacity(val_x.len());
                for x in val_x {
                    preds.push(predict(&model, x)?.label);
                }
                let cm = confusion_from_labels(&classes, val_y, &preds)?;
                Ok((params, precision_recall_f(&cm).macro_f))
            })
            .collect();
        for s in scores {
            cells.push(s?);
        }
    }
    cells.sort_by(|a, b| {
        a.0.c
            .total_cmp(&b.0.c)
            .then(a.0.gamma.total_cmp(&b.0.gamma))
    });

    let (params, score) = cells
        .iter()
        .copied()
        .fold(None, |best: Option<(KernelParams, f64)>, cell| match best {
            Some(b) if b.1 >= cell.1 => Some(b),
            _ => Some(cell),
        })
        .expect("nonempty grid");
    Ok(GridResult {
        params,
        score,
        cells,
    })
}
