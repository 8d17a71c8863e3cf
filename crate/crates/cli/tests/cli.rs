use std::path::Path;
use std::process::{Command, Output};

use glyphspec_core::eval::{render_glyph, synth_dataset, SynthSpec};
use glyphspec_core::io::{encode_png, read_json, write_atomic};
use glyphspec_core::{GrayImage, NumeralGraph, OvoModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glyphspec"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_glyph(path: &Path, class: usize, seed: u64) {
    let img = render_glyph(class, &mut ChaCha8Rng::seed_from_u64(seed));
    write_atomic(path, &encode_png(&img).unwrap()).unwrap();
}

#[test]
fn graph_of_a_plus() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("plus.png");
    write_glyph(&img, 1, 0);
    let out = dir.path().join("out");
    let o = run(&["graph", s(&img), "--out", s(&out), "--debug"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = NumeralGraph::load_json(&out.join("plus.graph.json")).unwrap();
    assert_eq!((g.order(), g.size()), (5, 4));
    for stage in ["filtered", "normalized", "binary", "skeleton"] {
        assert!(out.join(format!("plus.{stage}.pgm")).exists());
    }
}

#[test]
fn graph_batch_skips_blank_images() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    write_glyph(&input.join("a.png"), 0, 1);
    write_glyph(&input.join("c.png"), 2, 1);
    write_atomic(
        &input.join("b.png"),
        &encode_png(&GrayImage::filled(32, 32, 0.9)).unwrap(),
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&["graph", s(&input), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(out.join("a.graph.json").exists());
    assert!(out.join("c.graph.json").exists());
    assert!(!out.join("b.graph.json").exists());
    assert!(stderr(&o).contains("b.png"));
    assert!(std::fs::read_to_string(out.join("skipped.json"))
        .unwrap()
        .contains("b.png"));
}

#[test]
fn graph_of_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["graph", s(dir.path()), "--out", s(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no PNG or PGM images"));
}

#[test]
fn train_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    synth_dataset(
        SynthSpec {
            classes: 10,
            per_class: 10,
            seed: 3,
        },
        &data,
    )
    .unwrap();
    let model = dir.path().join("model");
    let o = run(&[
        "train",
        s(&data.join("manifest.csv")),
        "--out",
        s(&model),
        "--fixed-params",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in [
        "ft1.json",
        "ft2.json",
        "ft3.json",
        "fusion.json",
        "params.json",
    ] {
        assert!(model.join(name).exists(), "{name}");
    }
    let m: OvoModel = read_json(&model.join("ft2.json")).unwrap();
    assert_eq!(m.pairs.len(), 45);
    assert_eq!(m.params.c, 0.031);

    let image = data.join("03_loop_0000.png");
    let o = run(&["predict", s(&model), s(&image)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let belief_line = text.lines().find(|l| l.starts_with("belief:")).unwrap();
    let total: f64 = belief_line
        .split_whitespace()
        .skip(1)
        .map(|kv| kv.split('=').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-5);
    assert!(text.lines().any(|l| l.starts_with("fused: ")));

    // A dot thins to one pixel: a one-node graph, zero-padded features.
    let mut dot = GrayImage::filled(32, 32, 0.9);
    for y in 14..18 {
        for x in 14..18 {
            dot.set(x, y, 0.1);
        }
    }
    let dot_path = dir.path().join("dot.png");
    write_atomic(&dot_path, &encode_png(&dot).unwrap()).unwrap();
    let o = run(&["graph", s(&dot_path), "--out", s(&dir.path().join("g"))]);
    assert!(stdout(&o).contains("1 nodes, 0 edges"), "{}", stdout(&o));
    let o = run(&["predict", s(&model), s(&dot_path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("fused: "));

    let o = run(&["predict", s(&model), s(&image), "--n", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("feature length"), "{}", stderr(&o));

    std::fs::write(model.join("ft1.json"), "{ not json").unwrap();
    let o = run(&["predict", s(&model), s(&image)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ft1.json"), "{}", stderr(&o));
}

#[test]
fn training_on_one_class_fails() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let m = synth_dataset(
        SynthSpec {
            classes: 2,
            per_class: 10,
            seed: 1,
        },
        &data,
    )
    .unwrap();
    let one: String = std::iter::once("path,label\n".to_string())
        .chain(
            m.samples()
                .iter()
                .filter(|x| x.label == 1)
                .map(|x| format!("{},1\n", x.path.display())),
        )
        .collect();
    let manifest = dir.path().join("one.csv");
    std::fs::write(&manifest, one).unwrap();
    let o = run(&[
        "train",
        s(&manifest),
        "--out",
        s(&dir.path().join("m")),
        "--fixed-params",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at least 2 classes"), "{}", stderr(&o));
}

#[test]
fn evaluate_prints_four_series() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    synth_dataset(
        SynthSpec {
            classes: 3,
            per_class: 10,
            seed: 2,
        },
        &data,
    )
    .unwrap();
    let out = dir.path().join("eval");
    let o = run(&[
        "evaluate",
        s(&data.join("manifest.csv")),
        "--out",
        s(&out),
        "--trials",
        "3",
        "--fixed-params",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for series in ["FT1", "FT2", "FT3", "fused"] {
        assert!(
            text.lines()
                .any(|l| l.starts_with(series) && l.contains('±')),
            "{text}"
        );
    }
    for f in [
        "report.json",
        "per_class.csv",
        "confusion_ft1.csv",
        "confusion_fused.csv",
        "config.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn bad_ratios_fail_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eval");
    let o = run(&[
        "evaluate",
        "missing.csv",
        "--ratios",
        "60:30:20",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sum to 100"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn synth_records_its_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "synth",
        "--classes",
        "2",
        "--per-class",
        "10",
        "--seed",
        "5",
        "--out",
        s(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let meta = std::fs::read_to_string(dir.path().join("synth.json")).unwrap();
    assert!(meta.contains("\"seed\": 5"));
    let o = run(&["synth", "--per-class", "5", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}
