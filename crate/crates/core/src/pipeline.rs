//! Single-image feature extraction and the run configuration shared by the
//! command-line tools.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{DatasetManifest, FeatureTable, ParamChoice, TrialConfig};
use crate::graphx::{
    build_graph, detect_interest_points_with, InterestPoint, NumeralGraph, DEFAULT_RDP_EPSILON,
};
use crate::imageproc::{
    binarize_otsu, dog_filter, normalize_size, thin, BinaryImage, GrayImage, SkeletonImage,
};
use crate::io::read_gray;
use crate::spectra::{graph_features, FeatureType, SpectralFeature};
use crate::svm::{default_grid, GridBase, KernelParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessParams {
    pub sigma1: f64,
    pub sigma2: f64,
    /// Side of the normalized square image.
    pub target: usize,
    pub rdp_epsilon: f64,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        Self {
            sigma1: 1.0,
            sigma2: 1.6,
            target: 64,
            rdp_epsilon: DEFAULT_RDP_EPSILON,
        }
    }
}

/// Every intermediate product of [`extract_graph`].
#[derive(Clone, Debug)]
pub struct Stages {
    pub filtered: GrayImage,
    pub normalized: GrayImage,
    pub binary: BinaryImage,
    pub skeleton: SkeletonImage,
    pub points: Vec<InterestPoint>,
    pub graph: NumeralGraph,
}

/// Filter, normalize, binarize, thin, detect points and link them.
pub fn extract_graph(img: &GrayImage, p: &PreprocessParams) -> Result<Stages> {
    let filtered = dog_filter(img, p.sigma1, p.sigma2)?;
    let normalized = normalize_size(&filtered, p.target)?;
    let binary = binarize_otsu(&normalized);
    let skeleton = thin(&binary);
    if skeleton.foreground_count() == 0 {
        return Err(Error::Content("no ink survives binarization".into()));
    }
    let points = detect_interest_points_with(&skeleton, p.rdp_epsilon)?;
    let graph = build_graph(&skeleton, &points)?;
    Ok(Stages {
        filtered,
        normalized,
        binary,
        skeleton,
        points,
        graph,
    })
}

/// The three spectral features of one image, indexed by [`FeatureType::index`].
pub fn image_features(
    img: &GrayImage,
    p: &PreprocessParams,
    n: usize,
) -> Result<[SpectralFeature; 3]> {
    graph_features(&extract_graph(img, p)?.graph, n)
}

pub fn file_features(path: &Path, p: &PreprocessParams, n: usize) -> Result<[Vec<f64>; 3]> {
    let img = read_gray(path)?;
    Ok(image_features(&img, p, n)?.map(|f| f.values))
}

/// An image that could not be turned into features.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub path: PathBuf,
    pub error: String,
}

/// Extracts features for every manifest sample in parallel. Failing images
/// are logged and reported instead of aborting the batch.
pub fn manifest_features(
    m: &DatasetManifest,
    p: &PreprocessParams,
    n: usize,
) -> Result<(FeatureTable, Vec<Skipped>)> {
    let results: Vec<Result<[Vec<f64>; 3]>> = m
        .samples()
        .par_iter()
        .map(|s| file_features(&s.path, p, n))
        .collect();
    let mut labels = Vec::new();
    let mut features: [Vec<Vec<f64>>; 3] = Default::default();
    let mut skipped = Vec::new();
    for (s, r) in m.samples().iter().zip(results) {
        match r {
            Ok(f) => {
                labels.push(s.label);
                for (col, v) in features.iter_mut().zip(f) {
                    col.push(v);
                }
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", s.path.display());
                skipped.push(Skipped {
                    path: s.path.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    Ok((FeatureTable::new(labels, features)?, skipped))
}

/// Per-feature-type meta-parameters keyed by name in config files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    #[serde(rename = "FT1")]
    pub ft1: KernelParams,
    #[serde(rename = "FT2")]
    pub ft2: KernelParams,
    #[serde(rename = "FT3")]
    pub ft3: KernelParams,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            ft1: KernelParams::reported(FeatureType::FT1),
            ft2: KernelParams::reported(FeatureType::FT2),
            ft3: KernelParams::reported(FeatureType::FT3),
        }
    }
}

impl FixedParams {
    pub fn as_array(&self) -> [KernelParams; 3] {
        [self.ft1, self.ft2, self.ft3]
    }
}

/// Run configuration read from JSON; every field is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub preprocess: PreprocessParams,
    /// Spectral feature length.
    pub n: usize,
    pub ratios: [u32; 3],
    pub trials: usize,
    pub seed: u64,
    /// Skip grid search and use `params`.
    pub fixed_params: bool,
    pub params: FixedParams,
    pub grid_base: GridBase,
    /// Explicit grids; the `grid_base` default grid otherwise.
    pub c_grid: Option<Vec<f64>>,
    pub gamma_grid: Option<Vec<f64>>,
    pub scale_features: bool,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            preprocess: PreprocessParams::default(),
            n: 3,
            ratios: [60, 20, 20],
            trials: 50,
            seed: 0,
            fixed_params: false,
            params: FixedParams::default(),
            grid_base: GridBase::Ten,
            c_grid: None,
            gamma_grid: None,
            scale_features: false,
            out: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let p = &self.preprocess;
        if !(p.sigma1 > 0.0 && p.sigma2 > p.sigma1 && p.sigma2.is_finite()) {
            return Err(Error::Config(format!(
                "sigmas must satisfy 0 < sigma1 < sigma2, got {} and {}",
                p.sigma1, p.sigma2
            )));
        }
        if p.target < 8 {
            return Err(Error::Config(format!(
                "target must be >= 8, got {}",
                p.target
            )));
        }
        if !(p.rdp_epsilon >= 0.0 && p.rdp_epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "rdp_epsilon must be >= 0, got {}",
                p.rdp_epsilon
            )));
        }
        if self.n == 0 {
            return Err(Error::Config("feature length n must be >= 1".into()));
        }
        self.trial_config().validate()
    }

    pub fn param_choice(&self) -> ParamChoice {
        if self.fixed_params {
            ParamChoice::Fixed {
                params: self.params.as_array(),
            }
        } else {
            ParamChoice::Grid {
                c: self
                    .c_grid
                    .clone()
                    .unwrap_or_else(|| default_grid(self.grid_base)),
                gamma: self
                    .gamma_grid
                    .clone()
                    .unwrap_or_else(|| default_grid(self.grid_base)),
            }
        }
    }

    pub fn trial_config(&self) -> TrialConfig {
        TrialConfig {
            ratios: self.ratios,
            trials: self.trials,
            base_seed: self.seed,
            params: self.param_choice(),
            scale_features: self.scale_features,
        }
    }
}
