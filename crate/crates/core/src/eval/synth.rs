//! Procedural stroke glyphs with ten distinct skeleton topologies.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DatasetManifest, Sample};
use crate::error::{Error, Result};
use crate::imageproc::GrayImage;
use crate::io::{encode_png, write_atomic};

pub const TEMPLATE_NAMES: [&str; 10] = [
    "line",
    "cross",
    "loop",
    "loop_tail",
    "tee",
    "wye",
    "zed",
    "ess",
    "aitch",
    "spiral",
];

const CANVAS: usize = 80;
const HALF_EXTENT: f64 = 26.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthSpec {
    pub classes: usize,
    pub per_class: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(2..=TEMPLATE_NAMES.len()).contains(&self.classes) {
            return Err(Error::Parameter(format!(
                "synthetic class count must be in 2..=10, got {}",
                self.classes
            )));
        }
        if self.per_class < 10 {
            return Err(Error::Parameter(format!(
                "synthetic samples per class must be >= 10, got {}",
                self.per_class
            )));
        }
        Ok(())
    }
}

type Stroke = Vec<(f64, f64)>;

fn arc(cx: f64, cy: f64, rx: f64, ry: f64, from: f64, to: f64, steps: usize) -> Stroke {
    (0..=steps)
        .map(|i| {
            let t = from + (to - from) * i as f64 / steps as f64;
            (cx + rx * t.cos(), cy + ry * t.sin())
        })
        .collect()
}

/// Replaces each interior vertex with a quadratic curve starting `r` before it.
fn rounded(points: &[(f64, f64)], r: f64) -> Stroke {
    let mut out = vec![points[0]];
    for w in points.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let toward = |p: (f64, f64)| {
            let d = ((p.0 - b.0).powi(2) + (p.1 - b.1).powi(2)).sqrt();
            let t = (r / d).min(0.5);
            (b.0 + t * (p.0 - b.0), b.1 + t * (p.1 - b.1))
        };
        let (p0, p2) = (toward(a), toward(c));
        for i in 0..=8 {
            let t = i as f64 / 8.0;
            let u = 1.0 - t;
            out.push((
                u * u * p0.0 + 2.0 * u * t * b.0 + t * t * p2.0,
                u * u * p0.1 + 2.0 * u * t * b.1 + t * t * p2.1,
            ));
        }
    }
    out.push(points[points.len() - 1]);
    out
}

/// Template strokes in a unit box, y pointing down.
fn template(class: usize) -> Vec<Stroke> {
    match class {
        0 => vec![vec![(0.0, -1.0), (0.0, 1.0)]],
        1 => vec![vec![(-0.8, 0.0), (0.8, 0.0)], vec![(0.0, -0.8), (0.0, 0.8)]],
        2 => vec![arc(0.0, 0.0, 0.6, 0.9, 0.0, 2.0 * PI, 64)],
        3 => vec![
            arc(0.0, -0.4, 0.5, 0.5, 0.0, 2.0 * PI, 48),
            vec![(0.5, -0.4), (0.5, 1.0)],
        ],
        4 => vec![
            vec![(-0.9, -0.8), (0.9, -0.8)],
            vec![(0.0, -0.8), (0.0, 1.0)],
        ],
        5 => vec![
            vec![(-0.8, -1.0), (0.0, 0.0)],
            vec![(0.8, -1.0), (0.0, 0.0)],
            vec![(0.0, 0.0), (0.0, 1.0)],
        ],
        6 => vec![rounded(
            &[(-0.8, -0.9), (0.8, -0.9), (-0.8, 0.9), (0.8, 0.9)],
            0.3,
        )],
        7 => {
            let mut s = arc(0.0, -0.5, 0.55, 0.5, -0.1 * PI, -1.5 * PI, 32);
            s.extend(
                arc(0.0, 0.5, 0.55, 0.5, -0.5 * PI, 0.9 * PI, 32)
                    .into_iter()
                    .skip(1),
            );
            vec![s]
        }
        8 => vec![
            vec![(-0.7, -1.0), (-0.7, 1.0)],
            vec![(0.7, -1.0), (0.7, 1.0)],
            vec![(-0.7, 0.0), (0.7, 0.0)],
        ],
        9 => {
            let s = (0..=120)
                .map(|i| {
                    let t = 3.4 * PI * i as f64 / 120.0;
                    let r = 0.12 + 0.8 * t / (3.4 * PI);
                    (r * t.cos(), r * t.sin())
                })
                .collect();
            vec![s]
        }
        _ => unreachable!("ten templates"),
    }
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Renders one randomized instance of template `class` as dark ink on a
/// light background.
pub fn render_glyph<R: Rng>(class: usize, rng: &mut R) -> GrayImage {
    let angle = rng.gen_range(-15f64..=15.0).to_radians();
    let scale = HALF_EXTENT * rng.gen_range(0.8..=1.2);
    let shift = (rng.gen_range(-5.0..=5.0), rng.gen_range(-5.0..=5.0));
    let width = rng.gen_range(2.2..=3.2);
    // Low-frequency warp for stroke jitter.
    let warp: [(f64, f64, f64); 2] = [0, 1].map(|_| {
        (
            rng.gen_range(0.02..=0.05),
            rng.gen_range(1.0..=2.5),
            rng.gen_range(0.0..2.0 * PI),
        )
    });
    let (sin, cos) = angle.sin_cos();
    let centre = CANVAS as f64 / 2.0;
    let strokes: Vec<Stroke> = template(class)
        .into_iter()
        .map(|s| {
            s.into_iter()
                .map(|(x, y)| {
                    let x = x + warp[0].0 * (warp[0].1 * y + warp[0].2).sin();
                    let y = y + warp[1].0 * (warp[1].1 * x + warp[1].2).sin();
                    (
                        centre + shift.0 + scale * (cos * x - sin * y),
                        centre + shift.1 + scale * (sin * x + cos * y),
                    )
                })
                .collect()
        })
        .collect();

    let mut img = GrayImage::filled(CANVAS, CANVAS, 0.95);
    for py in 0..CANVAS {
        for px in 0..CANVAS {
            let p = (px as f64 + 0.5, py as f64 + 0.5);
            let d = strokes
                .iter()
                .flat_map(|s| s.windows(2).map(move |w| segment_distance(p, w[0], w[1])))
                .fold(f64::INFINITY, f64::min);
            let coverage = (width / 2.0 + 0.5 - d).clamp(0.0, 1.0);
            img.set(px, py, 0.95 - 0.85 * coverage);
        }
    }
    img
}

/// Writes `classes × per_class` PNG glyphs plus `manifest.csv` into `out`.
/// Labels are `1..=classes`; sample `i` of class `c` is seeded from
/// `(seed, c, i)` alone, so images do not depend on the total count.
pub fn synth_dataset(spec: SynthSpec, out: &Path) -> Result<DatasetManifest> {
    spec.validate()?;
    std::fs::create_dir_all(out)?;
    let mut samples = Vec::with_capacity(spec.classes * spec.per_class);
    for (class, name) in TEMPLATE_NAMES.iter().enumerate().take(spec.classes) {
        for i in 0..spec.per_class {
            let sample_seed = spec
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(((class as u64) << 32) | i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
            let img = render_glyph(class, &mut rng);
            let file = format!("{:02}_{name}_{i:04}.png", class + 1);
            write_atomic(&out.join(&file), &encode_png(&img)?)?;
            samples.push(Sample {
                path: out.join(file),
                label: class as u32 + 1,
            });
        }
    }
    let manifest = DatasetManifest::new(samples)?;
    write_atomic(&out.join("manifest.csv"), &manifest.to_csv(out)?)?;
    Ok(manifest)
}
