//! Image decoding/encoding and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imageproc::{BinaryImage, GrayImage};

/// Loads a PNG or binary PGM (P5) image as grayscale in `[0, 1]`.
///
/// Colour PNGs go through the luma conversion of the `image` crate.
pub fn read_gray(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"P5") {
        return decode_pgm(&bytes).map_err(|m| Error::parse(path, m));
    }
    let decoded = image::load_from_memory(&bytes).map_err(|e| Error::parse(path, e))?;
    let luma = decoded.to_luma8();
    let (w, h) = luma.dimensions();
    let data = luma
        .into_raw()
        .into_iter()
        .map(|v| v as f64 / 255.0)
        .collect();
    GrayImage::new(w as usize, h as usize, data)
}

fn decode_pgm(bytes: &[u8]) -> std::result::Result<GrayImage, String> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or("malformed PGM header")?;
    }
    let [w, h, maxval] = fields;
    if maxval == 0 || maxval > 65535 {
        return Err(format!("unsupported PGM maxval {maxval}"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let sample = if maxval < 256 { 1 } else { 2 };
    let raster = bytes
        .get(pos..pos + w * h * sample)
        .ok_or("truncated PGM raster")?;
    let data: Vec<f64> = if sample == 1 {
        raster.iter().map(|&v| v as f64 / maxval as f64).collect()
    } else {
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / maxval as f64)
            .collect()
    };
    GrayImage::new(w, h, data.into_iter().map(|v: f64| v.min(1.0)).collect())
        .map_err(|e| e.to_string())
}

/// Binary (P5, maxval 255) PGM encoding.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| (v * 255.0).round() as u8));
    out
}

/// Binary raster as PGM, black ink on a white background.
pub fn encode_pgm_binary(img: &BinaryImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&p| if p { 0u8 } else { 255 }));
    out
}

/// Encodes as an 8-bit grayscale PNG.
pub fn encode_png(img: &GrayImage) -> Result<Vec<u8>> {
    let raw: Vec<u8> = img
        .data()
        .iter()
        .map(|&v| (v * 255.0).round() as u8)
        .collect();
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, raw)
        .ok_or_else(|| Error::Contract("raster size mismatch".into()))?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)?;
    Ok(out.into_inner())
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::parse(path, "not a file path"))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json_atomic<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::parse(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::parse(path, e))
}
