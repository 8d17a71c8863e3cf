//! Handwritten glyph recognition through spectral graph embedding.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`imageproc`] turns a grayscale scan into a one-pixel-wide skeleton
//!    (DoG filtering, size normalization, Otsu binarization, Guo–Hall thinning).
//! 2. [`graphx`] finds endpoints, junctions and corners on the skeleton and
//!    links them into a graph whose edges carry Euclidean lengths.
//! 3. [`spectra`] embeds the graph into vector space through the sorted
//!    eigenvalues of its weighted adjacency, weighted Laplacian and distance
//!    matrices.
//! 4. [`svm`] classifies each spectrum with a one-vs-one RBF SVM, and
//!    [`fusion`] combines the three classifiers with Bayesian belief
//!    integration.
//!
//! [`eval`] drives repeated randomized train/validation/test trials and
//! [`pipeline`] wires the stages together for a single image.

pub mod error;
pub mod eval;
pub mod fusion;
pub mod graphx;
pub mod imageproc;
pub mod io;
pub mod pipeline;
pub mod spectra;
pub mod svm;

pub use error::{Error, Result};

pub use graphx::{InterestPoint, NumeralGraph, PointKind};
pub use imageproc::{BinaryImage, GrayImage, SkeletonImage};

pub use spectra::{FeatureType, GraphMatrix, MatrixKind, SpectralFeature, Spectrum};

pub use eval::{DatasetManifest, ExperimentReport, SplitSpec};
pub use fusion::{ConfusionMatrix, FusionModel, ProbMatrix};
pub use pipeline::{PipelineConfig, PreprocessParams};
pub use svm::{BinarySvmModel, KernelParams, OvoModel};
