//! Dense optical flow: Horn-Schunck estimation, Middlebury colorization and
//! `.flo` file I/O.

mod color;
mod flo;
mod hs;

pub use color::{color_wheel, flow_to_color, NCOLS};
pub use flo::{decode_flo, encode_flo, read_flo, write_flo, FLO_TAG};
pub use hs::{estimate_derivatives, flow_sequence, horn_schunck, Derivatives, HsOutput, HsParams};

use crate::error::{Error, Result};

/// Per-pixel displacement `(u, v)` in pixels, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl FlowField {
    pub fn new(width: usize, height: usize, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "flow dimensions {width}x{height} must be positive"
            )));
        }
        let n = width * height;
        if u.len() != n || v.len() != n {
            return Err(Error::invalid(format!(
                "{width}x{height} flow needs {n} components each, got u={} v={}",
                u.len(),
                v.len()
            )));
        }
        if u.iter().chain(&v).any(|c| !c.is_finite()) {
            return Err(Error::invalid("flow contains non-finite components"));
        }
        Ok(Self { width, height, u, v })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height], vec![0.0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn at(&self, x: usize, y: usize) -> (f64, f64) {
        let i = y * self.width + x;
        (self.u[i], self.v[i])
    }

    /// Largest vector magnitude in the field.
    pub fn max_magnitude(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(u, v)| u.hypot(*v))
            .fold(0.0, f64::max)
    }

    /// Every component multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.u.iter().map(|c| c * k).collect(),
            self.v.iter().map(|c| c * k).collect(),
        )
    }
}
