use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use glyphspec_core::eval::{
    run_trials, split_indices, synth_dataset, train_bundle, SynthSpec, SERIES_NAMES,
};
use glyphspec_core::io::{
    encode_pgm, encode_pgm_binary, read_gray, write_atomic, write_json_atomic,
};
use glyphspec_core::pipeline::{extract_graph, image_features, manifest_features, Skipped};
use glyphspec_core::spectra::write_feature_rows;
use glyphspec_core::{DatasetManifest, FeatureType, PipelineConfig, SplitSpec};
use serde::Serialize;

use crate::bundle::{self, BundleMeta};
use crate::options::{Cli, Command};

pub enum Outcome {
    Complete,
    /// Outputs were written for every input except `skipped` ones.
    Partial {
        skipped: usize,
    },
}

fn outcome(skipped: &[Skipped], out: &Path) -> Result<Outcome> {
    if skipped.is_empty() {
        return Ok(Outcome::Complete);
    }
    write_json_atomic(&out.join("skipped.json"), &skipped)?;
    Ok(Outcome::Partial {
        skipped: skipped.len(),
    })
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let cfg = cli.global.config()?;
    match &cli.command {
        Command::Synth { classes, per_class } => synth(&cfg, *classes, *per_class),
        Command::Graph { input } => graph(&cfg, input, cli.global.debug),
        Command::Features { manifest } => features(&cfg, manifest),
        Command::Train { manifest } => train(&cfg, manifest),
        Command::Predict { bundle, image } => predict(bundle, image, cli.global.n),
        Command::Evaluate { manifest } => evaluate(&cfg, manifest),
    }
}

#[derive(Serialize)]
struct SynthRecord {
    seed: u64,
    classes: usize,
    per_class: usize,
}

fn synth(cfg: &PipelineConfig, classes: usize, per_class: usize) -> Result<Outcome> {
    let spec = SynthSpec {
        classes,
        per_class,
        seed: cfg.seed,
    };
    let m = synth_dataset(spec, &cfg.out)?;
    write_json_atomic(
        &cfg.out.join("synth.json"),
        &SynthRecord {
            seed: cfg.seed,
            classes,
            per_class,
        },
    )?;
    println!(
        "wrote {} images in {} classes to {}",
        m.len(),
        m.classes().len(),
        cfg.out.join("manifest.csv").display()
    );
    Ok(Outcome::Complete)
}

fn is_image(p: &Path) -> bool {
    matches!(
        p.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("png" | "pgm")
    )
}

fn list_images(input: &Path) -> Result<Vec<PathBuf>> {
    if !input.is_dir() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(input)
        .with_context(|| format!("listing {}", input.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file() && is_image(p));
    files.sort();
    if files.is_empty() {
        bail!("no PNG or PGM images in {}", input.display());
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

fn graph(cfg: &PipelineConfig, input: &Path, debug: bool) -> Result<Outcome> {
    let files = list_images(input)?;
    let mut skipped = Vec::new();
    for path in &files {
        let result = read_gray(path).and_then(|img| extract_graph(&img, &cfg.preprocess));
        let stages = match result {
            Ok(s) => s,
            Err(e) => {
                log::error!("{}: {e}", path.display());
                skipped.push(Skipped {
                    path: path.clone(),
                    error: e.to_string(),
                });
                continue;
            }
        };
        let name = stem(path);
        stages
            .graph
            .save_json(&cfg.out.join(format!("{name}.graph.json")))?;
        if debug {
            let dbg = |suffix: &str| cfg.out.join(format!("{name}.{suffix}.pgm"));
            write_atomic(&dbg("filtered"), &encode_pgm(&stages.filtered))?;
            write_atomic(&dbg("normalized"), &encode_pgm(&stages.normalized))?;
            write_atomic(&dbg("binary"), &encode_pgm_binary(&stages.binary))?;
            write_atomic(
                &dbg("skeleton"),
                &encode_pgm_binary(stages.skeleton.as_binary()),
            )?;
        }
        println!(
            "{}: {} nodes, {} edges",
            path.display(),
            stages.graph.order(),
            stages.graph.size()
        );
    }
    if skipped.len() == files.len() {
        write_json_atomic(&cfg.out.join("skipped.json"), &skipped)?;
        bail!(
            "none of the {} input image(s) produced a graph",
            files.len()
        );
    }
    outcome(&skipped, &cfg.out)
}

fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let m = DatasetManifest::read_csv(path)?;
    if m.is_empty() {
        bail!("manifest {} lists no samples", path.display());
    }
    Ok(m)
}

fn features(cfg: &PipelineConfig, manifest: &Path) -> Result<Outcome> {
    let m = read_manifest(manifest)?;
    let (table, skipped) = manifest_features(&m, &cfg.preprocess, cfg.n)?;
    let mut rows = Vec::with_capacity(3 * table.len());
    for i in 0..table.len() {
        for ft in FeatureType::ALL {
            rows.push((
                table.labels()[i],
                glyphspec_core::SpectralFeature {
                    feature_type: ft,
                    values: table.rows(ft)[i].clone(),
                },
            ));
        }
    }
    let mut csv = Vec::new();
    write_feature_rows(&mut csv, rows, cfg.n)?;
    let path = cfg.out.join("features.csv");
    write_atomic(&path, &csv)?;
    println!(
        "wrote {} feature rows to {}",
        3 * table.len(),
        path.display()
    );
    outcome(&skipped, &cfg.out)
}

fn train(cfg: &PipelineConfig, manifest: &Path) -> Result<Outcome> {
    let m = read_manifest(manifest)?;
    let (table, skipped) = manifest_features(&m, &cfg.preprocess, cfg.n)?;
    let split = split_indices(table.labels(), &SplitSpec::new(cfg.ratios, cfg.seed)?)
        .context("splitting the manifest into train/validation/test")?;
    let choice = cfg.param_choice();
    let b = train_bundle(
        &table,
        &split.train,
        &split.val,
        &choice,
        cfg.scale_features,
    )
    .context("training the per-feature-type classifiers")?;
    let params = FeatureType::ALL
        .iter()
        .map(|&ft| glyphspec_core::eval::ChosenParams {
            feature_type: ft,
            params: b.params[ft.index()],
            validation_macro_f: b.grid_scores.map(|s| s[ft.index()]),
        })
        .collect();
    let meta = BundleMeta {
        seed: cfg.seed,
        ratios: cfg.ratios,
        n: cfg.n,
        preprocess: cfg.preprocess,
        scale_features: cfg.scale_features,
        fixed_params: cfg.fixed_params,
        classes: b.fusion.classes.clone(),
        params,
        train_samples: split.train.len(),
        validation_samples: split.val.len(),
        skipped: skipped.clone(),
    };
    bundle::save(&cfg.out, &b, &meta)?;
    for (ft, p) in FeatureType::ALL.iter().zip(&b.params) {
        println!(
            "{ft}: C = {}, gamma = {}, {} binary models",
            p.c,
            p.gamma,
            b.models[ft.index()].pairs.len()
        );
    }
    println!("model bundle written to {}", cfg.out.display());
    outcome(&skipped, &cfg.out)
}

fn predict(dir: &Path, image: &Path, n_override: Option<usize>) -> Result<Outcome> {
    let (b, meta) = bundle::load(dir)?;
    let n = n_override.unwrap_or(meta.n);
    let img = read_gray(image)?;
    let features = image_features(&img, &meta.preprocess, n)?.map(|f| f.values);
    let p = b.predict(&features)?;
    for (ft, ind) in FeatureType::ALL.iter().zip(&p.individual) {
        println!("{ft}: {}", ind.label);
    }
    let belief: Vec<String> = b
        .fusion
        .classes
        .iter()
        .zip(&p.fused.belief)
        .map(|(c, v)| format!("{c}={v:.6}"))
        .collect();
    println!("belief: {}", belief.join(" "));
    println!("fused: {}", p.label);
    Ok(Outcome::Complete)
}

fn evaluate(cfg: &PipelineConfig, manifest: &Path) -> Result<Outcome> {
    let m = read_manifest(manifest)?;
    let (table, skipped) = manifest_features(&m, &cfg.preprocess, cfg.n)?;
    let report = run_trials(&table, &cfg.trial_config())?;
    write_json_atomic(&cfg.out.join("config.json"), cfg)?;
    write_json_atomic(&cfg.out.join("report.json"), &report)?;
    write_atomic(&cfg.out.join("per_class.csv"), &report.per_class_csv()?)?;
    for (s, name) in SERIES_NAMES.iter().enumerate() {
        let csv = report.confusion_total(s).to_csv(&report.classes);
        write_atomic(
            &cfg.out
                .join(format!("confusion_{}.csv", name.to_lowercase())),
            csv.as_bytes(),
        )?;
    }
    print!("{}", report.summary_table());
    outcome(&skipped, &cfg.out)
}
