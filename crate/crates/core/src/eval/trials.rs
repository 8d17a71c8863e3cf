use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    confusion_from_labels, mean_std, precision_recall_f, split_indices, Metrics, SplitSpec,
};
use crate::error::{Error, Result};
use crate::fusion::{confusion_matrix, fuse, ConfusionMatrix, Fused, FusionModel};
use crate::spectra::FeatureType;
use crate::svm::{grid_search, predict, train_ovo_scaled, KernelParams, OvoModel, Prediction};

/// Report series in output order: the three feature types, then fusion.
pub const SERIES_NAMES: [&str; 4] = ["FT1", "FT2", "FT3", "fused"];

/// Precomputed spectral features for a labelled dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    labels: Vec<u32>,
    /// `features[ft][sample]`, indexed by [`FeatureType::index`].
    features: [Vec<Vec<f64>>; 3],
}

impl FeatureTable {
    pub fn new(labels: Vec<u32>, features: [Vec<Vec<f64>>; 3]) -> Result<Self> {
        let n = features[0].first().map_or(0, Vec::len);
        for f in &features {
            if f.len() != labels.len() {
                return Err(Error::Contract(format!(
                    "{} feature rows for {} labels",
                    f.len(),
                    labels.len()
                )));
            }
            if f.iter().any(|row| row.len() != n) {
                return Err(Error::Contract("feature rows differ in length".into()));
            }
        }
        Ok(Self { labels, features })
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Feature vector length.
    pub fn n(&self) -> usize {
        self.features[0].first().map_or(0, Vec::len)
    }

    pub fn rows(&self, ft: FeatureType) -> &[Vec<f64>] {
        &self.features[ft.index()]
    }

    fn select(&self, ft: FeatureType, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter()
            .map(|&i| self.features[ft.index()][i].clone())
            .collect()
    }

    fn select_labels(&self, idx: &[usize]) -> Vec<u32> {
        idx.iter().map(|&i| self.labels[i]).collect()
    }
}

/// Fixed meta-parameters per feature type, or a grid searched on the
/// validation split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ParamChoice {
    Fixed { params: [KernelParams; 3] },
    Grid { c: Vec<f64>, gamma: Vec<f64> },
}

impl ParamChoice {
    /// The per-feature-type values reported for the original data.
    pub fn reported() -> Self {
        ParamChoice::Fixed {
            params: FeatureType::ALL.map(KernelParams::reported),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub ratios: [u32; 3],
    pub trials: usize,
    pub base_seed: u64,
    pub params: ParamChoice,
    pub scale_features: bool,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        SplitSpec::new(self.ratios, self.base_seed)?;
        if self.trials == 0 {
            return Err(Error::Config("trial count must be >= 1".into()));
        }
        match &self.params {
            ParamChoice::Fixed { params } => {
                for p in params {
                    KernelParams::new(p.c, p.gamma)?;
                }
            }
            ParamChoice::Grid { c, gamma } => {
                if c.is_empty() || gamma.is_empty() {
                    return Err(Error::Config("C and gamma grids must be nonempty".into()));
                }
                for &v in c.iter().chain(gamma) {
                    KernelParams::new(v, v)?;
                }
            }
        }
        Ok(())
    }
}

/// Three per-feature-type classifiers plus their validation-calibrated fusion.
#[derive(Clone, Debug, PartialEq)]
pub struct Bundle {
    pub models: [OvoModel; 3],
    pub fusion: FusionModel,
    pub params: [KernelParams; 3],
    /// Validation macro F of the chosen cell when grid search ran.
    pub grid_scores: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundlePrediction {
    pub individual: [Prediction; 3],
    pub fused: Fused,
    pub label: u32,
}

impl Bundle {
    /// `features` is indexed by [`FeatureType::index`].
    pub fn predict(&self, features: &[Vec<f64>; 3]) -> Result<BundlePrediction> {
        let individual = [
            predict(&self.models[0], &features[0])?,
            predict(&self.models[1], &features[1])?,
            predict(&self.models[2], &features[2])?,
        ];
        let fused = fuse(&self.fusion, &individual.clone().map(|p| p.class_index))?;
        let label = self.fusion.classes[fused.class_index];
        Ok(BundlePrediction {
            individual,
            fused,
            label,
        })
    }
}

/// Trains one classifier per feature type on `train`, choosing parameters
/// per `params`, and calibrates fusion on `val`.
pub fn train_bundle(
    table: &FeatureTable,
    train: &[usize],
    val: &[usize],
    params: &ParamChoice,
    scale: bool,
) -> Result<Bundle> {
    let train_y = table.select_labels(train);
    let val_y = table.select_labels(val);
    let mut models = Vec::with_capacity(3);
    let mut chosen = [KernelParams { c: 1.0, gamma: 1.0 }; 3];
    let mut scores = [0.0; 3];
    for ft in FeatureType::ALL {
        let train_x = table.select(ft, train);
        let p = match params {
            ParamChoice::Fixed { params } => params[ft.index()],
            ParamChoice::Grid { c, gamma } => {
                let val_x = table.select(ft, val);
                let g = grid_search(&train_x, &train_y, &val_x, &val_y, c, gamma, scale)?;
                scores[ft.index()] = g.score;
                g.params
            }
        };
        chosen[ft.index()] = p;
        let mut m = train_ovo_scaled(&train_x, &train_y, p, scale)?;
        m.feature_type = Some(ft);
        models.push(m);
    }
    let models: [OvoModel; 3] = models.try_into().expect("three feature types");

    let classes = models[0].classes.clone();
    let mut confusions = Vec::with_capacity(3);
    for (ft, m) in FeatureType::ALL.iter().zip(&models) {
        let mut actual = Vec::with_capacity(val.len());
        let mut preds = Vec::with_capacity(val.len());
        for &i in val {
            let truth = classes.binary_search(&table.labels[i]).map_err(|_| {
                Error::Data(format!(
                    "validation class {} does not occur in training data",
                    table.labels[i]
                ))
            })?;
            actual.push(truth);
            preds.push(predict(m, &table.features[ft.index()][i])?.class_index);
        }
        confusions.push((
            ft.name().to_string(),
            confusion_matrix(&actual, &preds, classes.len())?,
        ));
    }
    let fusion = FusionModel::calibrate(classes, confusions)?;
    Ok(Bundle {
        models,
        fusion,
        params: chosen,
        grid_scores: matches!(params, ParamChoice::Grid { .. }).then_some(scores),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetrics {
    pub name: String,
    pub metrics: Metrics,
    pub confusion: ConfusionMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChosenParams {
    pub feature_type: FeatureType,
    #[serde(flatten)]
    pub params: KernelParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_macro_f: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub params: Vec<ChosenParams>,
    /// In [`SERIES_NAMES`] order.
    pub series: Vec<SeriesMetrics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub name: String,
    pub mean_macro_f: f64,
    pub std_macro_f: f64,
    pub mean_percent: f64,
    pub std_percent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub base_seed: u64,
    pub ratios: [u32; 3],
    pub trial_count: usize,
    pub feature_length: usize,
    pub scale_features: bool,
    pub params: ParamChoice,
    pub classes: Vec<u32>,
    pub sample_count: usize,
    pub summary: Vec<SeriesSummary>,
    pub trials: Vec<TrialReport>,
}

impl ExperimentReport {
    pub fn series(&self, name: &str) -> Option<&SeriesSummary> {
        self.summary.iter().find(|s| s.name == name)
    }

    /// Per-class precision, recall and F averaged over trials, one row per
    /// (series, class).
    pub fn per_class_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["series", "class", "precision", "recall", "f_measure"])?;
        let t = self.trials.len().max(1) as f64;
        for (s, name) in SERIES_NAMES.iter().enumerate() {
            for (k, class) in self.classes.iter().enumerate() {
                let mut sums = [0.0; 3];
                for trial in &self.trials {
                    let m = &trial.series[s].metrics.per_class[k];
                    sums[0] += m.precision;
                    sums[1] += m.recall;
                    sums[2] += m.f_measure;
                }
                w.write_record([
                    name.to_string(),
                    class.to_string(),
                    format!("{:.6}", sums[0] / t),
                    format!("{:.6}", sums[1] / t),
                    format!("{:.6}", sums[2] / t),
                ])?;
            }
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    /// Test-set confusion counts of one series summed over all trials.
    pub fn confusion_total(&self, series: usize) -> ConfusionMatrix {
        let k = self.classes.len();
        let mut counts = vec![vec![0u64; k]; k];
        for trial in &self.trials {
            for (i, row) in trial.series[series].confusion.rows().iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    counts[i][j] += c;
                }
            }
        }
        ConfusionMatrix::from_counts(counts).expect("square")
    }

    /// Plain-text mean ± std table in percent.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "{} trials, split {}:{}:{}, n = {}, seed {}\n",
            self.trial_count,
            self.ratios[0],
            self.ratios[1],
            self.ratios[2],
            self.feature_length,
            self.base_seed
        );
        out.push_str(&format!("{:<8}{:>18}\n", "series", "macro F (%)"));
        for s in &self.summary {
            out.push_str(&format!(
                "{:<8}{:>10.2} ± {:.2}\n",
                s.name, s.mean_percent, s.std_percent
            ));
        }
        out
    }
}

fn run_trial(
    table: &FeatureTable,
    classes: &[u32],
    cfg: &TrialConfig,
    trial: usize,
) -> Result<TrialReport> {
    let seed = cfg.base_seed.wrapping_add(trial as u64);
    let split = split_indices(&table.labels, &SplitSpec::new(cfg.ratios, seed)?)?;
    let bundle = train_bundle(
        table,
        &split.train,
        &split.val,
        &cfg.params,
        cfg.scale_features,
    )?;

    let actual = table.select_labels(&split.test);
    let mut preds: [Vec<u32>; 4] = Default::default();
    for &i in &split.test {
        let features = FeatureType::ALL.map(|ft| table.features[ft.index()][i].clone());
        let p = bundle.predict(&features)?;
        for (s, ind) in p.individual.iter().enumerate() {
            preds[s].push(ind.label);
        }
        preds[3].push(p.label);
    }
    let series = SERIES_NAMES
        .iter()
        .zip(&preds)
        .map(|(name, p)| {
            let confusion = confusion_from_labels(classes, &actual, p)?;
            Ok(SeriesMetrics {
                name: name.to_string(),
                metrics: precision_recall_f(&confusion),
                confusion,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let params = FeatureType::ALL
        .iter()
        .map(|&ft| ChosenParams {
            feature_type: ft,
            params: bundle.params[ft.index()],
            validation_macro_f: bundle.grid_scores.map(|s| s[ft.index()]),
        })
        .collect();
    Ok(TrialReport {
        trial,
        seed,
        params,
        series,
    })
}

/// Runs `cfg.trials` independent split/train/calibrate/test rounds with
/// seeds `base_seed + t` and aggregates macro F per series. Trials run in
/// parallel; results are reduced in trial order.
pub fn run_trials(table: &FeatureTable, cfg: &TrialConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let classes: Vec<u32> = {
        let mut c = table.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    };
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(table, &classes, cfg, t))
        .collect::<Result<Vec<_>>>()?;

    let summary = SERIES_NAMES
        .iter()
        .enumerate()
        .map(|(s, name)| {
            let values: Vec<f64> = trials.iter().map(|t| t.series[s].metrics.macro_f).collect();
            let (mean, std) = mean_std(&values);
            SeriesSummary {
                name: name.to_string(),
                mean_macro_f: mean,
                std_macro_f: std,
                mean_percent: 100.0 * mean,
                std_percent: 100.0 * std,
            }
        })
        .collect();
    Ok(ExperimentReport {
        base_seed: cfg.base_seed,
        ratios: cfg.ratios,
        trial_count: cfg.trials,
        feature_length: table.n(),
        scale_features: cfg.scale_features,
        params: cfg.params.clone(),
        classes,
        sample_count: table.len(),
        summary,
        trials,
    })
}
