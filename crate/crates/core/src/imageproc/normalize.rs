use super::GrayImage;
use crate::error::{Error, Result};

/// Background border kept around the resampled glyph, in pixels.
pub const NORMALIZE_MARGIN: usize = 2;

/// Rescales the glyph's bounding box to fit a `target`×`target` canvas.
///
/// Ink is every pixel darker than the midpoint of the image's intensity
/// range. Its bounding box is bilinearly resampled by the limiting scale
/// factor into `target − 2·margin`, centred, and the rest of the canvas is
/// filled with the mean intensity of the non-ink pixels.
pub fn normalize_size(img: &GrayImage, target: usize) -> Result<GrayImage> {
    if target < 8 {
        return Err(Error::Parameter(format!(
            "normalization target must be >= 8, got {target}"
        )));
    }
    if img.is_empty() {
        return Err(Error::Content("empty image".into()));
    }

    let (lo, hi) = img
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi - lo <= 1e-12 {
        return Err(Error::Content("blank image: no ink below mid-range".into()));
    }
    let cut = lo + 0.5 * (hi - lo);

    let (w, h) = (img.width(), img.height());
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    let (mut bg_sum, mut bg_count) = (0.0, 0usize);
    for y in 0..h {
        for x in 0..w {
            let v = img.get(x, y);
            if v < cut {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            } else {
                bg_sum += v;
                bg_count += 1;
            }
        }
    }
    if x0 == usize::MAX {
        return Err(Error::Content("blank image: no ink below mid-range".into()));
    }
    let background = if bg_count > 0 {
        bg_sum / bg_count as f64
    } else {
        hi
    };

    let box_w = (x1 - x0 + 1) as f64;
    let box_h = (y1 - y0 + 1) as f64;
    let inner = (target - 2 * NORMALIZE_MARGIN) as f64;
    let scale = inner / box_w.max(box_h);
    let out_w = ((box_w * scale).round() as usize).clamp(1, target - 2 * NORMALIZE_MARGIN);
    let out_h = ((box_h * scale).round() as usize).clamp(1, target - 2 * NORMALIZE_MARGIN);
    let off_x = (target - out_w) / 2;
    let off_y = (target - out_h) / 2;

    let mut out = GrayImage::filled(target, target, background);
    for oy in 0..out_h {
        for ox in 0..out_w {
            // Pixel-centre mapping back into the source bounding box.
            let sx = x0 as f64 + (ox as f64 + 0.5) / scale - 0.5;
            let sy = y0 as f64 + (oy as f64 + 0.5) / scale - 0.5;
            out.set(off_x + ox, off_y + oy, bilinear(img, sx, sy));
        }
    }
    Ok(out)
}

fn bilinear(img: &GrayImage, x: f64, y: f64) -> f64 {
    let max_x = (img.width() - 1) as f64;
    let max_y = (img.height() - 1) as f64;
    let x = x.clamp(0.0, max_x);
    let y = y.clamp(0.0, max_y);
    let (xf, yf) = (x.floor(), y.floor());
    let (tx, ty) = (x - xf, y - yf);
    let (xa, ya) = (xf as usize, yf as usize);
    let xb = (xa + 1).min(img.width() - 1);
    let yb = (ya + 1).min(img.height() - 1);
    let top = img.get(xa, ya) * (1.0 - tx) + img.get(xb, ya) * tx;
    let bottom = img.get(xa, yb) * (1.0 - tx) + img.get(xb, yb) * tx;
    top * (1.0 - ty) + bottom * ty
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ink_bbox(img: &GrayImage) -> (usize, usize, usize, usize) {
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        for y in 0..img.height() {
            for x in 0..img.width() {
                if img.get(x, y) < 0.5 {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
            }
        }
        (x0, y0, x1, y1)
    }

    #[test]
    fn identity_scale_is_pixel_exact() {
        let mut img = GrayImage::filled(32, 32, 1.0);
        // Glyph touching all four sides of the 28x28 inner box.
        for i in 2..30 {
            img.set(i, 2, 0.0);
            img.set(i, 29, 0.0);
            img.set(2, i, 0.0);
            img.set(29, i, 0.0);
            img.set(i, i, 0.1);
        }
        let out = normalize_size(&img, 32).unwrap();
        assert_eq!((out.width(), out.height()), (32, 32));
        for (a, b) in out.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn wide_glyph_scales_by_limiting_dimension() {
        // 128x64 raster whose ink (a 3 px frame) spans the full frame. Scale = 60/128, so the
        // glyph becomes 60x30 and is centred at offsets (2, 17).
        let mut img = GrayImage::filled(128, 64, 1.0);
        for t in 0..3 {
            for x in 0..128 {
                img.set(x, t, 0.0);
                img.set(x, 63 - t, 0.0);
            }
            for y in 0..64 {
                img.set(t, y, 0.0);
                img.set(127 - t, y, 0.0);
            }
        }
        let out = normalize_size(&img, 64).unwrap();
        assert_eq!((out.width(), out.height()), (64, 64));
        let (x0, y0, x1, y1) = ink_bbox(&out);
        assert_eq!((x0, y0), (2, 17));
        assert_eq!((x1, y1), (61, 46));
    }

    #[test]
    fn blank_image_is_a_content_error() {
        let img = GrayImage::filled(20, 20, 0.7);
        assert!(matches!(normalize_size(&img, 64), Err(Error::Content(_))));
    }

    #[test]
    fn tiny_target_rejected() {
        let img = GrayImage::filled(20, 20, 0.7);
        assert!(matches!(normalize_size(&img, 7), Err(Error::Parameter(_))));
    }
}
