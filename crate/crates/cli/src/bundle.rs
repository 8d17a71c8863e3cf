//! On-disk model bundle: one classifier file per feature type, the fusion
//! model, and the run metadata.

use std::path::Path;

use anyhow::{bail, Context, Result};
use glyphspec_core::eval::{Bundle, ChosenParams};
use glyphspec_core::io::{read_json, write_json_atomic};
use glyphspec_core::pipeline::Skipped;
use glyphspec_core::{FeatureType, FusionModel, OvoModel, PreprocessParams};
use serde::{Deserialize, Serialize};

pub const FUSION_FILE: &str = "fusion.json";
pub const META_FILE: &str = "params.json";

pub fn model_file(ft: FeatureType) -> String {
    format!("{}.json", ft.name().to_lowercase())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleMeta {
    pub seed: u64,
    pub ratios: [u32; 3],
    pub n: usize,
    pub preprocess: PreprocessParams,
    pub scale_features: bool,
    pub fixed_params: bool,
    pub classes: Vec<u32>,
    pub params: Vec<ChosenParams>,
    pub train_samples: usize,
    pub validation_samples: usize,
    pub skipped: Vec<Skipped>,
}

pub fn save(dir: &Path, bundle: &Bundle, meta: &BundleMeta) -> Result<()> {
    for (ft, m) in FeatureType::ALL.iter().zip(&bundle.models) {
        write_json_atomic(&dir.join(model_file(*ft)), m)?;
    }
    write_json_atomic(&dir.join(FUSION_FILE), &bundle.fusion)?;
    write_json_atomic(&dir.join(META_FILE), meta)?;
    Ok(())
}

pub fn load(dir: &Path) -> Result<(Bundle, BundleMeta)> {
    let meta: BundleMeta = read_json(&dir.join(META_FILE))?;
    let mut models = Vec::with_capacity(3);
    for ft in FeatureType::ALL {
        let path = dir.join(model_file(ft));
        let m: OvoModel = read_json(&path)?;
        m.validate()
            .with_context(|| format!("invalid model {}", path.display()))?;
        if m.classes != meta.classes {
            bail!(
                "{} was trained on different classes than {META_FILE} lists",
                path.display()
            );
        }
        models.push(m);
    }
    let fusion: FusionModel = read_json(&dir.join(FUSION_FILE))?;
    if fusion.classes != meta.classes {
        bail!("{FUSION_FILE} was calibrated on different classes than {META_FILE} lists");
    }
    let fusion = FusionModel::new(fusion.classes, fusion.classifiers)?;
    let params = [0, 1, 2].map(|i| models[i].params);
    Ok((
        Bundle {
            models: models.try_into().expect("three models"),
            fusion,
            params,
            grid_scores: None,
        },
        meta,
    ))
}
