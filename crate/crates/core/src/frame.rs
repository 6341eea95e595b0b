//! Grayscale and RGB frames plus PGM/PPM input and output.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};

use crate::error::{Error, Result};

/// Luminance weights applied to RGB input.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Row-major intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayFrame {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "frame dimensions {width}x{height} must be positive"
            )));
        }
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "{width}x{height} frame needs {} intensities, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(i) = data
            .iter()
            .position(|v| !v.is_finite() || !(0.0..=1.0).contains(v))
        {
            return Err(Error::invalid(format!(
                "intensity {} at pixel ({}, {}) is outside [0, 1]",
                data[i],
                i % width,
                i / width
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, data)
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

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Row-major 8-bit RGB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    width: usize,
    height: usize,
    data: Vec<[u8; 3]>,
}

impl RgbFrame {
    pub fn new(width: usize, height: usize, data: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "frame dimensions {width}x{height} must be positive"
            )));
        }
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "{width}x{height} frame needs {} pixels, got {}",
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

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Result<Self> {
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.data[y * self.width + x]
    }

    /// Gray frame replicated into three channels.
    pub fn from_gray(gray: &GrayFrame) -> Self {
        let data = gray
            .data()
            .iter()
            .map(|&v| {
                let b = (v * 255.0).round() as u8;
                [b, b, b]
            })
            .collect();
        Self {
            width: gray.width(),
            height: gray.height(),
            data,
        }
    }

    /// Luminance `0.299 R + 0.587 G + 0.114 B`, scaled to `[0, 1]`.
    pub fn to_gray(&self) -> GrayFrame {
        let data = self.data.iter().map(|&p| luminance(p)).collect();
        GrayFrame {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

pub(crate) fn luminance(p: [u8; 3]) -> f64 {
    let l = (LUMA_WEIGHTS[0] * f64::from(p[0])
        + LUMA_WEIGHTS[1] * f64::from(p[1])
        + LUMA_WEIGHTS[2] * f64::from(p[2]))
        / 255.0;
    l.clamp(0.0, 1.0)
}

fn image_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Reads a PGM or PPM file as RGB (gray files are replicated).
pub fn read_rgb(path: &Path) -> Result<RgbFrame> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let img = image::load_from_memory_with_format(&bytes, ImageFormat::Pnm)
        .map_err(|e| image_err(path, e))?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let data = rgb.pixels().map(|p| p.0).collect();
    RgbFrame::new(w, h, data)
}

/// Reads a PGM directly or a PPM converted to luminance.
pub fn read_gray(path: &Path) -> Result<GrayFrame> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let img = image::load_from_memory_with_format(&bytes, ImageFormat::Pnm)
        .map_err(|e| image_err(path, e))?;
    match img {
        DynamicImage::ImageLuma8(g) => {
            let (w, h) = (g.width() as usize, g.height() as usize);
            let data = g.pixels().map(|p| f64::from(p.0[0]) / 255.0).collect();
            GrayFrame::new(w, h, data)
        }
        other => {
            let rgb = other.to_rgb8();
            let (w, h) = (rgb.width() as usize, rgb.height() as usize);
            let data = rgb.pixels().map(|p| p.0).collect();
            Ok(RgbFrame::new(w, h, data)?.to_gray())
        }
    }
}

fn encode_pnm(width: usize, height: usize, bytes: &[u8], gray: bool) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let (subtype, color) = if gray {
        (PnmSubtype::Graymap(SampleEncoding::Binary), ExtendedColorType::L8)
    } else {
        (PnmSubtype::Pixmap(SampleEncoding::Binary), ExtendedColorType::Rgb8)
    };
    PnmEncoder::new(Cursor::new(&mut out))
        .with_subtype(subtype)
        .write_image(bytes, width as u32, height as u32, color)
        .map_err(|e| Error::invalid(format!("PNM encoding failed: {e}")))?;
    Ok(out)
}

/// Binary PPM (P6, maxval 255).
pub fn write_ppm(frame: &RgbFrame, path: &Path) -> Result<()> {
    let flat: Vec<u8> = frame.pixels().iter().flatten().copied().collect();
    let bytes = encode_pnm(frame.width(), frame.height(), &flat, false)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Binary PGM (P5, maxval 255); intensities are rounded to the nearest level.
pub fn write_pgm(frame: &GrayFrame, path: &Path) -> Result<()> {
    let flat: Vec<u8> = frame
        .data()
        .iter()
        .map(|&v| (v * 255.0).round() as u8)
        .collect();
    let bytes = encode_pnm(frame.width(), frame.height(), &flat, true)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// `.pgm`/`.ppm` files of a directory in lexicographic order.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_frame = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("pgm") || e.eq_ignore_ascii_case("ppm"));
        if is_frame && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

pub fn read_rgb_dir(dir: &Path) -> Result<Vec<RgbFrame>> {
    list_frames(dir)?.iter().map(|p| read_rgb(p)).collect()
}
