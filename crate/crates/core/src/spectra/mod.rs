//! Graph matrices and their sorted eigenvalue spectra.

mod jacobi;

pub use jacobi::{eigen_decompose, EigenDecomposition};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphx::NumeralGraph;

/// Which graph matrix a [`GraphMatrix`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MatrixKind {
    /// Weighted adjacency.
    Wa,
    /// Degree matrix minus weighted adjacency.
    Wl,
    /// All-pairs Euclidean node distances.
    Dist,
}

/// Feature type: the spectrum of one of the three graph matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureType {
    FT1,
    FT2,
    FT3,
}

impl FeatureType {
    pub const ALL: [FeatureType; 3] = [FeatureType::FT1, FeatureType::FT2, FeatureType::FT3];

    pub fn matrix_kind(self) -> MatrixKind {
        match self {
            FeatureType::FT1 => MatrixKind::Wa,
            FeatureType::FT2 => MatrixKind::Wl,
            FeatureType::FT3 => MatrixKind::Dist,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureType::FT1 => "FT1",
            FeatureType::FT2 => "FT2",
            FeatureType::FT3 => "FT3",
        }
    }
}

impl std::fmt::Display for FeatureType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FeatureType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "FT1" | "WA" => Ok(FeatureType::FT1),
            "FT2" | "WL" => Ok(FeatureType::FT2),
            "FT3" | "DIST" => Ok(FeatureType::FT3),
            other => Err(Error::Parameter(format!("unknown feature type {other:?}"))),
        }
    }
}

/// Dense symmetric matrix attached to a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphMatrix {
    kind: MatrixKind,
    n: usize,
    entries: Vec<f64>,
}

impl GraphMatrix {
    /// Wraps row-major `entries`; fails unless square and symmetric to within
    /// `1e-12` scaled by the largest magnitude (at least 1).
    pub fn new(kind: MatrixKind, n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Contract(format!(
                "{n}x{n} matrix needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        let m = Self { kind, n, entries };
        let tol = 1e-12 * m.max_abs().max(1.0);
        for i in 0..n {
            for j in i + 1..n {
                if (m.get(i, j) - m.get(j, i)).abs() > tol {
                    return Err(Error::Contract(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Weighted adjacency: `w(i, j)` on edges, zero elsewhere.
pub fn adjacency_matrix(g: &NumeralGraph) -> GraphMatrix {
    let n = g.order();
    let mut entries = vec![0.0; n * n];
    for e in g.edges() {
        entries[e.u * n + e.v] = e.weight;
        entries[e.v * n + e.u] = e.weight;
    }
    GraphMatrix {
        kind: MatrixKind::Wa,
        n,
        entries,
    }
}

/// `D − WA` with `D` holding unweighted vertex degrees.
pub fn laplacian_matrix(g: &NumeralGraph) -> GraphMatrix {
    let n = g.order();
    let mut entries: Vec<f64> = adjacency_matrix(g).entries.iter().map(|v| -v).collect();
    for (i, d) in g.degrees().into_iter().enumerate() {
        entries[i * n + i] = d as f64;
    }
    GraphMatrix {
        kind: MatrixKind::Wl,
        n,
        entries,
    }
}

/// Straight-line distances between every pair of node coordinates,
/// adjacent or not.
pub fn distance_matrix(g: &NumeralGraph) -> Result<GraphMatrix> {
    let n = g.order();
    let nodes = g.nodes();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let dx = nodes[i].x as f64 - nodes[j].x as f64;
            let dy = nodes[i].y as f64 - nodes[j].y as f64;
            let d = (dx * dx + dy * dy).sqrt();
            if d == 0.0 {
                return Err(Error::Degenerate(format!(
                    "nodes {i} and {j} share coordinates ({}, {})",
                    nodes[i].x, nodes[i].y
                )));
            }
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(GraphMatrix {
        kind: MatrixKind::Dist,
        n,
        entries,
    })
}

pub fn graph_matrix(g: &NumeralGraph, kind: MatrixKind) -> Result<GraphMatrix> {
    match kind {
        MatrixKind::Wa => Ok(adjacency_matrix(g)),
        MatrixKind::Wl => Ok(laplacian_matrix(g)),
        MatrixKind::Dist => distance_matrix(g),
    }
}

/// Eigenvalues in descending order, with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts `values` descending.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All eigenvalues of a symmetric matrix, sorted descending.
pub fn eig_sym(m: &GraphMatrix) -> Spectrum {
    Spectrum::new(eigen_decompose(m).values)
}

/// Fixed-length feature: the `n` largest eigenvalues, zero-padded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFeature {
    pub feature_type: FeatureType,
    pub values: Vec<f64>,
}

pub fn spectral_feature(
    s: &Spectrum,
    n: usize,
    feature_type: FeatureType,
) -> Result<SpectralFeature> {
    if n == 0 {
        return Err(Error::Parameter("feature length n must be >= 1".into()));
    }
    let mut values: Vec<f64> = s.values().iter().copied().take(n).collect();
    values.resize(n, 0.0);
    Ok(SpectralFeature {
        feature_type,
        values,
    })
}

/// The three features of a graph, indexed by [`FeatureType::index`].
pub fn graph_features(g: &NumeralGraph, n: usize) -> Result<[SpectralFeature; 3]> {
    let feature = |ft: FeatureType| -> Result<SpectralFeature> {
        let m = graph_matrix(g, ft.matrix_kind())?;
        spectral_feature(&eig_sym(&m), n, ft)
    };
    Ok([
        feature(FeatureType::FT1)?,
        feature(FeatureType::FT2)?,
        feature(FeatureType::FT3)?,
    ])
}

/// Writes one CSV row per feature: `label,feature_type,v1..vn`.
pub fn write_feature_rows<W: Write>(
    out: W,
    rows: impl IntoIterator<Item = (u32, SpectralFeature)>,
    n: usize,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["label".to_string(), "feature_type".to_string()];
    header.extend((1..=n).map(|i| format!("v{i}")));
    w.write_record(&header)?;
    for (label, f) in rows {
        if f.values.len() != n {
            return Err(Error::Contract(format!(
                "feature has {} values, expected {n}",
                f.values.len()
            )));
        }
        let mut rec = vec![label.to_string(), f.feature_type.to_string()];
        rec.extend(f.values.iter().map(|v| format!("{v:.12}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
