use super::GrayImage;
use crate::error::{Error, Result};

/// Normalized 1-D Gaussian taps with radius `ceil(3σ)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Separable Gaussian blur with edge-replicating borders.
pub fn gaussian_blur(data: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    let taps = gaussian_kernel(sigma);
    let radius = (taps.len() / 2) as isize;
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;

    let mut rows = vec![0.0; data.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let sx = clamp(x as isize + k as isize - radius, width);
                acc += t * data[y * width + sx];
            }
            rows[y * width + x] = acc;
        }
    }

    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let sy = clamp(y as isize + k as isize - radius, height);
                acc += t * rows[sy * width + x];
            }
            out[y * width + x] = acc;
        }
    }
    out
}

fn check_sigmas(sigma1: f64, sigma2: f64) -> Result<()> {
    if !(sigma1 > 0.0 && sigma1.is_finite()) {
        return Err(Error::Parameter(format!(
            "sigma1 must be > 0, got {sigma1}"
        )));
    }
    if !(sigma2 > sigma1 && sigma2.is_finite()) {
        return Err(Error::Parameter(format!(
            "sigma2 must exceed sigma1 ({sigma1}), got {sigma2}"
        )));
    }
    Ok(())
}

/// Raw difference `blur(σ1) − blur(σ2)` before rescaling.
pub fn dog_response(img: &GrayImage, sigma1: f64, sigma2: f64) -> Result<Vec<f64>> {
    check_sigmas(sigma1, sigma2)?;
    let (w, h) = (img.width(), img.height());
    let narrow = gaussian_blur(img.data(), w, h, sigma1);
    let wide = gaussian_blur(img.data(), w, h, sigma2);
    Ok(narrow.iter().zip(&wide).map(|(a, b)| a - b).collect())
}

/// Min-max rescale into `[0, 1]`. A flat field (range below 1e-12) maps to all zeros.
pub fn rescale_unit(data: &[f64], width: usize, height: usize) -> GrayImage {
    let (lo, hi) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let scaled = if data.is_empty() || range <= 1e-12 {
        vec![0.0; data.len()]
    } else {
        data.iter()
            .map(|v| ((v - lo) / range).clamp(0.0, 1.0))
            .collect()
    };
    GrayImage::from_raw(width, height, scaled)
}

/// Difference-of-Gaussians band-pass, rescaled to `[0, 1]`.
pub fn dog_filter(img: &GrayImage, sigma1: f64, sigma2: f64) -> Result<GrayImage> {
    let diff = dog_response(img, sigma1, sigma2)?;
    Ok(rescale_unit(&diff, img.width(), img.height()))
}
