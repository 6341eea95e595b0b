//! Per-frame description.
//!
//! The builtin descriptor splits the frame into a `cells_x x cells_y` grid
//! and emits, per cell (row-major), an L1-normalized histogram of luminance
//! gradient orientations over `[0, 2pi)` weighted by gradient magnitude,
//! optionally followed by the cell's mean R, G, B in `[0, 1]`. Externally
//! computed descriptors (for example CNN activations) enter through PMTX
//! files instead.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{luminance, RgbFrame};
use crate::pmtx::Matrix;
use crate::timeseries::MultiChannelSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridParams {
    pub cells_x: usize,
    pub cells_y: usize,
    pub orientation_bins: usize,
    pub include_mean_color: bool,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            cells_x: 4,
            cells_y: 4,
            orientation_bins: 8,
            include_mean_color: true,
        }
    }
}

impl GridParams {
    pub fn dim(&self) -> usize {
        self.cells_x * self.cells_y * self.cell_len()
    }

    fn cell_len(&self) -> usize {
        self.orientation_bins + if self.include_mean_color { 3 } else { 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells_x == 0 || self.cells_y == 0 || self.orientation_bins == 0 {
            return Err(Error::config(format!(
                "descriptor grid {}x{} with {} bins must be positive",
                self.cells_x, self.cells_y, self.orientation_bins
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DescriptorSpec {
    Builtin(GridParams),
    /// Descriptors precomputed elsewhere and stored as PMTX.
    External(PathBuf),
}

impl Default for DescriptorSpec {
    fn default() -> Self {
        DescriptorSpec::Builtin(GridParams::default())
    }
}

impl DescriptorSpec {
    /// Output length of the builtin descriptor; `None` for external files.
    pub fn dim(&self) -> Option<usize> {
        match self {
            DescriptorSpec::Builtin(g) => Some(g.dim()),
            DescriptorSpec::External(_) => None,
        }
    }

    fn grid(&self) -> Result<&GridParams> {
        match self {
            DescriptorSpec::Builtin(g) => {
                g.validate()?;
                Ok(g)
            }
            DescriptorSpec::External(p) => Err(Error::config(format!(
                "descriptor spec points at external file {}; frames cannot be described with it",
                p.display()
            ))),
        }
    }
}

/// Describes one frame with the builtin grid descriptor.
pub fn describe_frame(frame: &RgbFrame, spec: &DescriptorSpec) -> Result<Vec<f64>> {
    let grid = spec.grid()?;
    let (w, h) = (frame.width(), frame.height());
    if w < grid.cells_x || h < grid.cells_y {
        return Err(Error::invalid(format!(
            "{w}x{h} frame is smaller than the {}x{} descriptor grid",
            grid.cells_x, grid.cells_y
        )));
    }

    let lum: Vec<f64> = frame.pixels().iter().map(|&p| luminance(p)).collect();
    let at = |x: usize, y: usize| lum[y * w + x];
    let bins = grid.orientation_bins;
    let mut out = Vec::with_capacity(grid.dim());

    for cy in 0..grid.cells_y {
        let (y0, y1) = (cy * h / grid.cells_y, (cy + 1) * h / grid.cells_y);
        for cx in 0..grid.cells_x {
            let (x0, x1) = (cx * w / grid.cells_x, (cx + 1) * w / grid.cells_x);
            let mut hist = vec![0.0; bins];
            let mut rgb = [0.0f64; 3];
            for y in y0..y1 {
                for x in x0..x1 {
                    let gx = 0.5 * (at((x + 1).min(w - 1), y) - at(x.saturating_sub(1), y));
                    let gy = 0.5 * (at(x, (y + 1).min(h - 1)) - at(x, y.saturating_sub(1)));
                    let mag = gx.hypot(gy);
                    if mag > 0.0 {
                        let theta = gy.atan2(gx).rem_euclid(TAU);
                        let bin = ((theta / TAU * bins as f64) as usize).min(bins - 1);
                        hist[bin] += mag;
                    }
                    let p = frame.get(x, y);
                    for (acc, c) in rgb.iter_mut().zip(p) {
                        *acc += f64::from(c);
                    }
                }
            }
            let total: f64 = hist.iter().sum();
            if total > 0.0 {
                hist.iter_mut().for_each(|b| *b /= total);
            }
            out.extend_from_slice(&hist);
            if grid.include_mean_color {
                let n = ((x1 - x0) * (y1 - y0)) as f64;
                out.extend(rgb.iter().map(|s| s / (255.0 * n)));
            }
        }
    }
    Ok(out)
}

/// Describes every frame; column `t` of the result is frame `t`'s descriptor.
pub fn describe_sequence(frames: &[RgbFrame], spec: &DescriptorSpec) -> Result<MultiChannelSeries> {
    let first = frames
        .first()
        .ok_or_else(|| Error::invalid("cannot describe an empty frame sequence"))?;
    if let Some((i, f)) = frames
        .iter()
        .enumerate()
        .find(|(_, f)| f.width() != first.width() || f.height() != first.height())
    {
        return Err(Error::invalid(format!(
            "frame {i} is {}x{}, frame 0 is {}x{}",
            f.width(),
            f.height(),
            first.width(),
            first.height()
        )));
    }
    let columns: Vec<Vec<f64>> = frames
        .par_iter()
        .map(|f| describe_frame(f, spec))
        .collect::<Result<_>>()?;
    let rows: Vec<f64> = columns.concat();
    MultiChannelSeries::from_time_major(frames.len(), columns[0].len(), &rows)
}

/// 0-based index of the middle frame, `floor(n / 2)`.
pub fn middle_frame_index(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("video has no frames"));
    }
    Ok(n / 2)
}

/// Loads a PMTX matrix as a series (rows are time steps, columns channels).
pub fn load_descriptor_matrix(path: &Path) -> Result<MultiChannelSeries> {
    let m = Matrix::read(path)?;
    MultiChannelSeries::from_time_major(m.rows, m.cols, &m.to_f64())
}

/// Stores a series as PMTX (values rounded to f32).
pub fn save_descriptor_matrix(series: &MultiChannelSeries, path: &Path) -> Result<()> {
    Matrix::from_f64(series.length(), series.channels(), &series.to_time_major())?.write(path)
}
