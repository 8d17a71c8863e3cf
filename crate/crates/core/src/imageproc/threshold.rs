use super::{BinaryImage, GrayImage};

pub const HISTOGRAM_BINS: usize = 256;

fn bin_of(v: f64) -> usize {
    ((v * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)
}

/// Otsu's global threshold.
///
/// Candidates are the bin boundaries `k/256` for `k` in `1..=255`; pixels
/// below the threshold form the ink class. Returns `None` when no candidate
/// separates two non-empty classes with positive between-class variance.
/// Ties keep the smallest threshold.
pub fn otsu_threshold(img: &GrayImage) -> Option<f64> {
    let mut counts = [0usize; HISTOGRAM_BINS];
    let mut sums = [0.0f64; HISTOGRAM_BINS];
    for &v in img.data() {
        let b = bin_of(v);
        counts[b] += 1;
        sums[b] += v;
    }
    let total = img.data().len() as f64;
    let total_sum: f64 = sums.iter().sum();

    let mut best: Option<(usize, f64)> = None;
    let (mut n0, mut s0) = (0usize, 0.0f64);
    for k in 1..HISTOGRAM_BINS {
        n0 += counts[k - 1];
        s0 += sums[k - 1];
        let n1 = img.data().len() - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let (w0, w1) = (n0 as f64 / total, n1 as f64 / total);
        let mu0 = s0 / n0 as f64;
        let mu1 = (total_sum - s0) / n1 as f64;
        let var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if var > 0.0 && best.is_none_or(|(_, b)| var > b) {
            best = Some((k, var));
        }
    }
    best.map(|(k, _)| k as f64 / HISTOGRAM_BINS as f64)
}

/// Global Otsu binarization; darker pixels are ink. Single-class images come
/// back all background.
pub fn binarize_otsu(img: &GrayImage) -> BinaryImage {
    let data = match otsu_threshold(img) {
        Some(t) => img.data().iter().map(|&v| v < t).collect(),
        None => vec![false; img.data().len()],
    };
    BinaryImage::new(img.width(), img.height(), data).expect("same dimensions")
}
