//! Raster preprocessing: grayscale scan to one-pixel-wide skeleton.

mod filter;
mod normalize;
mod thinning;
mod threshold;

pub use filter::{dog_filter, dog_response, gaussian_blur, gaussian_kernel, rescale_unit};
pub use normalize::{normalize_size, NORMALIZE_MARGIN};
pub use thinning::thin;
pub use threshold::{binarize_otsu, otsu_threshold, HISTOGRAM_BINS};

use crate::error::{Error, Result};

/// Row-major grayscale raster with intensities in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Contract(format!(
                "gray image {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Contract(format!(
                "gray intensity {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value.clamp(0.0, 1.0); width * height],
        }
    }

    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value.clamp(0.0, 1.0);
    }
}

/// Row-major boolean raster; `true` marks ink.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Contract(format!(
                "binary image {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    /// Parses an ASCII drawing where `#` (or `1`) is ink and anything else is
    /// background. Rows must share one length.
    pub fn from_ascii(art: &str) -> Result<Self> {
        let rows: Vec<&str> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut data = Vec::with_capacity(width * rows.len());
        for row in &rows {
            if row.chars().count() != width {
                return Err(Error::Contract("ragged ascii raster".into()));
            }
            data.extend(row.chars().map(|c| c == '#' || c == '1'));
        }
        Self::new(width, rows.len(), data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Out-of-range coordinates read as background.
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return false;
        }
        self.data[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&p| p).count()
    }

    /// Foreground pixel coordinates in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }

    /// Number of foreground pixels among the eight neighbours of `(x, y)`.
    pub fn neighbor_count(&self, x: usize, y: usize) -> usize {
        neighbor_ring(self, x, y).iter().filter(|&&p| p).count()
    }

    /// Labels 8-connected foreground components. Returns the per-pixel label
    /// map (`None` for background) and the number of components. Labels are
    /// assigned in raster order of each component's first pixel.
    pub fn components(&self) -> (Vec<Option<usize>>, usize) {
        let mut labels = vec![None; self.data.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.data.len() {
            if !self.data[start] || labels[start].is_some() {
                continue;
            }
            labels[start] = Some(count);
            stack.push(start);
            while let Some(idx) = stack.pop() {
                let (x, y) = ((idx % self.width) as isize, (idx / self.width) as isize);
                for (dx, dy) in NEIGHBOR_OFFSETS {
                    let (nx, ny) = (x + dx, y + dy);
                    if self.get_signed(nx, ny) {
                        let n = ny as usize * self.width + nx as usize;
                        if labels[n].is_none() {
                            labels[n] = Some(count);
                            stack.push(n);
                        }
                    }
                }
            }
            count += 1;
        }
        (labels, count)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    /// Shifts all foreground by `(dx, dy)` into a canvas of the given size.
    /// Fails if any ink would leave the canvas.
    pub fn translated(&self, dx: isize, dy: isize, width: usize, height: usize) -> Result<Self> {
        let mut out = Self::empty(width, height);
        for (x, y) in self.foreground() {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if nx < 0 || ny < 0 || nx as usize >= width || ny as usize >= height {
                return Err(Error::Parameter(format!(
                    "translation ({dx}, {dy}) moves ink off a {width}x{height} canvas"
                )));
            }
            out.set(nx as usize, ny as usize, true);
        }
        Ok(out)
    }
}

/// A thinned binary raster: a fixpoint of [`thin`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkeletonImage(BinaryImage);

impl SkeletonImage {
    /// Accepts `bin` only if thinning would leave it unchanged.
    pub fn from_thinned(bin: BinaryImage) -> Result<Self> {
        let thinned = thin(&bin);
        if thinned.0 != bin {
            return Err(Error::Contract(
                "raster is not a thinning fixpoint; run `thin` first".into(),
            ));
        }
        Ok(thinned)
    }

    pub(crate) fn from_binary_unchecked(bin: BinaryImage) -> Self {
        Self(bin)
    }

    pub fn as_binary(&self) -> &BinaryImage {
        &self.0
    }

    pub fn into_binary(self) -> BinaryImage {
        self.0
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.0.get(x, y)
    }

    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        self.0.get_signed(x, y)
    }
}

impl std::ops::Deref for SkeletonImage {
    type Target = BinaryImage;

    fn deref(&self) -> &BinaryImage {
        &self.0
    }
}

/// Clockwise from north: N, NE, E, SE, S, SW, W, NW.
pub(crate) const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// The eight neighbours of `(x, y)` in [`NEIGHBOR_OFFSETS`] order.
pub(crate) fn neighbor_ring(img: &BinaryImage, x: usize, y: usize) -> [bool; 8] {
    let (x, y) = (x as isize, y as isize);
    NEIGHBOR_OFFSETS.map(|(dx, dy)| img.get_signed(x + dx, y + dy))
}
