//! Dataset manifests, stratified splits, recognition metrics and repeated
//! randomized trials.

mod synth;
mod trials;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{confusion_matrix, ConfusionMatrix};

pub use synth::{render_glyph, synth_dataset, SynthSpec, TEMPLATE_NAMES};
pub use trials::{
    run_trials, train_bundle, Bundle, BundlePrediction, ChosenParams, ExperimentReport,
    FeatureTable, ParamChoice, SeriesMetrics, SeriesSummary, TrialConfig, TrialReport,
    SERIES_NAMES,
};

/// Smallest class size a split accepts.
pub const MIN_CLASS_SIZE: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub path: PathBuf,
    pub label: u32,
}

/// Labelled image list. Relative paths resolve against the manifest's
/// directory when read from disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetManifest {
    samples: Vec<Sample>,
    classes: Vec<u32>,
}

impl DatasetManifest {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &samples {
            if !seen.insert(&s.path) {
                return Err(Error::Data(format!(
                    "duplicate manifest path {}",
                    s.path.display()
                )));
            }
        }
        let classes = samples
            .iter()
            .map(|s| s.label)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(Self { samples, classes })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Ascending distinct labels.
    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Reads a `path,label` CSV.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new(""));
        let mut reader =
            csv::Reader::from_path(path).map_err(|e| Error::parse(path, e.to_string()))?;
        let mut samples = Vec::new();
        for row in reader.deserialize::<Sample>() {
            let mut s = row.map_err(|e| Error::parse(path, e.to_string()))?;
            if s.path.is_relative() {
                s.path = base.join(&s.path);
            }
            samples.push(s);
        }
        Self::new(samples)
    }

    /// Writes a `path,label` CSV with paths relative to `base` where possible.
    pub fn to_csv(&self, base: &Path) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for s in &self.samples {
            let path = s.path.strip_prefix(base).unwrap_or(&s.path);
            w.serialize(Sample {
                path: path.to_path_buf(),
                label: s.label,
            })?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    fn subset(&self, idx: &[usize]) -> Self {
        let samples: Vec<Sample> = idx.iter().map(|&i| self.samples[i].clone()).collect();
        Self::new(samples).expect("subset of a valid manifest")
    }
}

/// Train/validation/test percentages and the shuffle seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub ratios: [u32; 3],
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(ratios: [u32; 3], seed: u64) -> Result<Self> {
        let spec = Self { ratios, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ratios.contains(&0) || self.ratios.iter().sum::<u32>() != 100 {
            return Err(Error::Config(format!(
                "split ratios must be positive and sum to 100, got {}:{}:{}",
                self.ratios[0], self.ratios[1], self.ratios[2]
            )));
        }
        Ok(())
    }
}

/// Sample indices of each part of a split, each list ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified split over raw labels. Per class of size `m`, train and
/// validation get `floor(m·r/100)` samples and test gets the remainder.
pub fn split_indices(labels: &[u32], spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = SplitIndices {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for (label, mut idx) in by_class {
        let m = idx.len();
        if m < MIN_CLASS_SIZE {
            return Err(Error::Data(format!(
                "class {label} has {m} samples; splitting needs at least {MIN_CLASS_SIZE}"
            )));
        }
        let n_train = m * spec.ratios[0] as usize / 100;
        let n_val = m * spec.ratios[1] as usize / 100;
        if n_train == 0 || n_val == 0 || n_train + n_val >= m {
            return Err(Error::Data(format!(
                "class {label} with {m} samples leaves an empty part under {}:{}:{}",
                spec.ratios[0], spec.ratios[1], spec.ratios[2]
            )));
        }
        idx.shuffle(&mut rng);
        out.train.extend_from_slice(&idx[..n_train]);
        out.val.extend_from_slice(&idx[n_train..n_train + n_val]);
        out.test.extend_from_slice(&idx[n_train + n_val..]);
    }
    out.train.sort_unstable();
    out.val.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

/// Splits a manifest into (train, validation, test) manifests.
pub fn split(
    m: &DatasetManifest,
    s: &SplitSpec,
) -> Result<(DatasetManifest, DatasetManifest, DatasetManifest)> {
    let idx = split_indices(&m.labels(), s)?;
    Ok((
        m.subset(&idx.train),
        m.subset(&idx.val),
        m.subset(&idx.test),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class precision, recall and F-measure plus their unweighted means.
/// Zero denominators give 0.
pub fn precision_recall_f(c: &ConfusionMatrix) -> Metrics {
    let n = c.classes();
    let per_class: Vec<ClassMetrics> = (0..n)
        .map(|k| {
            let cp = c.get(k, k);
            let predicted: u64 = (0..n).map(|i| c.get(i, k)).sum();
            let actual: u64 = (0..n).map(|j| c.get(k, j)).sum();
            let precision = ratio(cp, predicted);
            let recall = ratio(cp, actual);
            let f_measure = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                precision,
                recall,
                f_measure,
            }
        })
        .collect();
    let mean = |f: fn(&ClassMetrics) -> f64| {
        if n == 0 {
            0.0
        } else {
            per_class.iter().map(f).sum::<f64>() / n as f64
        }
    };
    Metrics {
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f: mean(|m| m.f_measure),
        per_class,
    }
}

/// Confusion matrix over raw labels, indexed by position in `classes`.
pub fn confusion_from_labels(
    classes: &[u32],
    actual: &[u32],
    predicted: &[u32],
) -> Result<ConfusionMatrix> {
    let index = |l: &u32| {
        classes
            .binary_search(l)
            .map_err(|_| Error::Contract(format!("label {l} is not a known class")))
    };
    let a = actual.iter().map(index).collect::<Result<Vec<_>>>()?;
    let p = predicted.iter().map(index).collect::<Result<Vec<_>>>()?;
    confusion_matrix(&a, &p, classes.len())
}

/// Mean and sample standard deviation; a single value has deviation 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(classes: u32, per: usize) -> Vec<u32> {
        (0..classes)
            .flat_map(|c| std::iter::repeat_n(c, per))
            .collect()
    }

    fn per_class(labels: &[u32], idx: &[usize], class: u32) -> usize {
        idx.iter().filter(|&&i| labels[i] == class).count()
    }

    #[test]
    fn sixty_twenty_twenty() {
        let ls = labels(3, 10);
        let s = split_indices(&ls, &SplitSpec::new([60, 20, 20], 1).unwrap()).unwrap();
        for c in 0..3 {
            assert_eq!(per_class(&ls, &s.train, c), 6);
            assert_eq!(per_class(&ls, &s.val, c), 2);
            assert_eq!(per_class(&ls, &s.test, c), 2);
        }
    }

    #[test]
    fn fifty_twentyfive_twentyfive_rounds_toward_test() {
        let ls = labels(2, 10);
        let s = split_indices(&ls, &SplitSpec::new([50, 25, 25], 1).unwrap()).unwrap();
        for c in 0..2 {
            assert_eq!(per_class(&ls, &s.train, c), 5);
            assert_eq!(per_class(&ls, &s.val, c), 2);
            assert_eq!(per_class(&ls, &s.test, c), 3);
        }
    }

    #[test]
    fn split_is_deterministic_partition() {
        let ls = labels(4, 17);
        let spec = SplitSpec::new([60, 20, 20], 99).unwrap();
        let a = split_indices(&ls, &spec).unwrap();
        assert_eq!(a, split_indices(&ls, &spec).unwrap());
        let mut all: Vec<usize> = a
            .train
            .iter()
            .chain(&a.val)
            .chain(&a.test)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..ls.len()).collect::<Vec<_>>());
        let other = split_indices(&ls, &SplitSpec::new([60, 20, 20], 100).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn split_rejects_small_classes_and_bad_ratios() {
        let mut ls = labels(2, 10);
        ls.extend([7, 7]);
        let spec = SplitSpec::new([60, 20, 20], 0).unwrap();
        assert!(matches!(split_indices(&ls, &spec), Err(Error::Data(_))));
        assert!(matches!(
            SplitSpec::new([60, 20, 10], 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            SplitSpec::new([100, 0, 0], 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn manifest_split_preserves_samples() {
        let samples = (0..30)
            .map(|i| Sample {
                path: PathBuf::from(format!("img{i}.png")),
                label: (i % 3) as u32 + 1,
            })
            .collect();
        let m = DatasetManifest::new(samples).unwrap();
        assert_eq!(m.classes(), &[1, 2, 3]);
        let (tr, va, te) = split(&m, &SplitSpec::new([60, 20, 20], 5).unwrap()).unwrap();
        assert_eq!((tr.len(), va.len(), te.len()), (18, 6, 6));
        let mut paths: Vec<_> = [&tr, &va, &te]
            .iter()
            .flat_map(|p| p.samples().iter().map(|s| s.path.clone()))
            .collect();
        paths.sort();
        paths.dedup();
        assert_eq!(paths.len(), 30);
    }

    #[test]
    fn manifest_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = DatasetManifest::new(vec![
            Sample {
                path: dir.path().join("a.png"),
                label: 3,
            },
            Sample {
                path: dir.path().join("sub/b.png"),
                label: 1,
            },
        ])
        .unwrap();
        let csv = m.to_csv(dir.path()).unwrap();
        assert_eq!(
            String::from_utf8(csv.clone()).unwrap(),
            "path,label\na.png,3\nsub/b.png,1\n"
        );
        let path = dir.path().join("manifest.csv");
        std::fs::write(&path, csv).unwrap();
        assert_eq!(DatasetManifest::read_csv(&path).unwrap(), m);
    }

    #[test]
    fn duplicate_paths_rejected() {
        let s = Sample {
            path: "x.png".into(),
            label: 1,
        };
        assert!(DatasetManifest::new(vec![s.clone(), s]).is_err());
    }

    #[test]
    fn perfect_and_direct_metrics() {
        let cm = ConfusionMatrix::from_counts(vec![vec![4, 0], vec![0, 6]]).unwrap();
        let m = precision_recall_f(&cm);
        assert!(m
            .per_class
            .iter()
            .all(|c| c.precision == 1.0 && c.recall == 1.0 && c.f_measure == 1.0));
        assert_eq!(m.macro_f, 1.0);

        // Class 0: CP=8, FP=2, FN=2.
        let cm = ConfusionMatrix::from_counts(vec![vec![8, 2], vec![2, 0]]).unwrap();
        let m = precision_recall_f(&cm);
        assert!((m.per_class[0].precision - 0.8).abs() < 1e-15);
        assert!((m.per_class[0].recall - 0.8).abs() < 1e-15);
        assert!((m.per_class[0].f_measure - 0.8).abs() < 1e-15);
    }

    #[test]
    fn absent_class_scores_zero() {
        let cm = ConfusionMatrix::from_counts(vec![vec![5, 0, 0], vec![0, 5, 0], vec![0, 0, 0]])
            .unwrap();
        let m = precision_recall_f(&cm);
        assert_eq!(
            m.per_class[2],
            ClassMetrics {
                precision: 0.0,
                recall: 0.0,
                f_measure: 0.0
            }
        );
        assert!((m.macro_f - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn labels_map_through_class_list() {
        let cm = confusion_from_labels(&[1, 2], &[1, 1, 2], &[1, 2, 2]).unwrap();
        assert_eq!(cm.rows(), &[vec![1, 1], vec![0, 1]]);
        assert!(confusion_from_labels(&[1, 2], &[3], &[1]).is_err());
    }

    #[test]
    fn sample_std() {
        assert_eq!(mean_std(&[0.7]), (0.7, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
