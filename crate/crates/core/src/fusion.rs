//! Bayesian belief integration of several classifiers.
//!
//! Each classifier is calibrated by its confusion matrix on held-out data,
//! turned into `P(actual = i | predicted = j)`. For a new sample the fused
//! belief in class `i` is the normalized product of those conditionals over
//! all classifiers' predictions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `counts[i][j]`: samples of actual class `i` predicted as `j`. Class
/// indices are 0-based positions in a shared class list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            counts: vec![vec![0; n]; n],
        }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let n = counts.len();
        if counts.iter().any(|row| row.len() != n) {
            return Err(Error::Contract("confusion matrix must be square".into()));
        }
        Ok(Self { counts })
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual][predicted]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn record(&mut self, actual: usize, predicted: usize) -> Result<()> {
        let n = self.classes();
        if actual >= n || predicted >= n {
            return Err(Error::Contract(format!(
                "class index ({actual}, {predicted}) outside 0..{n}"
            )));
        }
        self.counts[actual][predicted] += 1;
        Ok(())
    }

    /// CSV grid with a header row of predicted classes and a leading column
    /// of actual classes.
    pub fn to_csv(&self, labels: &[u32]) -> String {
        let mut out = String::from("actual\\predicted");
        for l in labels {
            out.push_str(&format!(",{l}"));
        }
        out.push('\n');
        for (i, row) in self.counts.iter().enumerate() {
            out.push_str(&labels.get(i).map_or(i.to_string(), |l| l.to_string()));
            for c in row {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Tallies `(actual, predicted)` index pairs.
pub fn confusion_matrix(actuals: &[usize], preds: &[usize], n: usize) -> Result<ConfusionMatrix> {
    if actuals.len() != preds.len() {
        return Err(Error::Contract(format!(
            "{} actual labels but {} predictions",
            actuals.len(),
            preds.len()
        )));
    }
    let mut cm = ConfusionMatrix::zeros(n);
    for (&a, &p) in actuals.iter().zip(preds) {
        cm.record(a, p)?;
    }
    Ok(cm)
}

/// Column-stochastic matrix: `get(i, j) = P(actual = i | predicted = j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbMatrix {
    rows: Vec<Vec<f64>>,
}

impl ProbMatrix {
    /// Accepts any square non-negative matrix; fusion only needs the
    /// entries, not stochastic columns.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Contract("probability matrix must be square".into()));
        }
        if rows.iter().flatten().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::Contract(
                "probabilities must be finite and >= 0".into(),
            ));
        }
        Ok(Self { rows })
    }

    pub fn classes(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, actual: usize, predicted: usize) -> f64 {
        self.rows[actual][predicted]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, predicted: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[predicted]).collect()
    }
}

/// Column-normalizes the counts after adding one to every cell, so a class
/// never predicted during calibration still yields a uniform column.
pub fn prob_matrix(c: &ConfusionMatrix) -> ProbMatrix {
    let n = c.classes();
    let col_sums: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| c.get(i, j) as f64 + 1.0).sum())
        .collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (c.get(i, j) as f64 + 1.0) / col_sums[j])
                .collect()
        })
        .collect();
    ProbMatrix { rows }
}

/// One calibrated classifier inside a [`FusionModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibratedClassifier {
    pub tag: String,
    pub probabilities: ProbMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionModel {
    /// Class labels; matrix index `i` refers to `classes[i]`.
    pub classes: Vec<u32>,
    pub classifiers: Vec<CalibratedClassifier>,
}

impl FusionModel {
    pub fn new(classes: Vec<u32>, classifiers: Vec<CalibratedClassifier>) -> Result<Self> {
        if classifiers.is_empty() {
            return Err(Error::Contract(
                "fusion needs at least one classifier".into(),
            ));
        }
        if let Some(c) = classifiers
            .iter()
            .find(|c| c.probabilities.classes() != classes.len())
        {
            return Err(Error::Contract(format!(
                "classifier {} has {} classes, fusion model has {}",
                c.tag,
                c.probabilities.classes(),
                classes.len()
            )));
        }
        Ok(Self {
            classes,
            classifiers,
        })
    }

    /// Calibrates from per-classifier confusion matrices.
    pub fn calibrate(
        classes: Vec<u32>,
        confusions: Vec<(String, ConfusionMatrix)>,
    ) -> Result<Self> {
        let classifiers = confusions
            .into_iter()
            .map(|(tag, cm)| CalibratedClassifier {
                tag,
                probabilities: prob_matrix(&cm),
            })
            .collect();
        Self::new(classes, classifiers)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fused {
    pub belief: Vec<f64>,
    pub class_index: usize,
}

/// Combines per-classifier predicted class indices (aligned with
/// `fm.classifiers`) into a normalized belief vector and its argmax.
/// Equal beliefs resolve to the lowest class index.
pub fn fuse(fm: &FusionModel, predictions: &[usize]) -> Result<Fused> {
    let n = fm.classes.len();
    if predictions.len() != fm.classifiers.len() {
        return Err(Error::Contract(format!(
            "{} predictions for {} classifiers",
            predictions.len(),
            fm.classifiers.len()
        )));
    }
    if let Some(&j) = predictions.iter().find(|&&j| j >= n) {
        return Err(Error::Contract(format!(
            "predicted class {j} outside 0..{n}"
        )));
    }

    let products: Vec<f64> = (0..n)
        .map(|i| {
            fm.classifiers
                .iter()
                .zip(predictions)
                .map(|(c, &j)| c.probabilities.get(i, j))
                .product()
        })
        .collect();
    let total: f64 = products.iter().sum();

    if total.is_nan() || total <= 0.0 {
        // Only reachable with unsmoothed matrices: fall back to plain voting.
        let mut votes = vec![0usize; n];
        for &j in predictions {
            votes[j] += 1;
        }
        let class_index = argmax_first(votes.iter().map(|&v| v as f64));
        let mut belief = vec![0.0; n];
        belief[class_index] = 1.0;
        return Ok(Fused {
            belief,
            class_index,
        });
    }

    let belief: Vec<f64> = products.iter().map(|p| p / total).collect();
    let class_index = argmax_first(belief.iter().copied());
    Ok(Fused {
        belief,
        class_index,
    })
}

fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}
