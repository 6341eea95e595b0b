//! Middlebury flow color coding.
//!
//! Hue follows the flow direction around a 55-entry color wheel, saturation
//! grows with magnitude relative to `max_radius`. Vectors longer than
//! `max_radius` are darkened to 75%.

use std::f64::consts::PI;

use super::FlowField;
use crate::error::{Error, Result};
use crate::frame::RgbFrame;

const RY: usize = 15;
const YG: usize = 6;
const GC: usize = 4;
const CB: usize = 11;
const BM: usize = 13;
const MR: usize = 6;

/// Number of color wheel entries.
pub const NCOLS: usize = RY + YG + GC + CB + BM + MR;

/// The color wheel as 0..=255 RGB triples.
pub fn color_wheel() -> [[f64; 3]; NCOLS] {
    let mut wheel = [[0.0; 3]; NCOLS];
    let ramp = |i: usize, n: usize| (255 * i / n) as f64;
    let mut k = 0;
    for i in 0..RY {
        wheel[k] = [255.0, ramp(i, RY), 0.0];
        k += 1;
    }
    for i in 0..YG {
        wheel[k] = [255.0 - ramp(i, YG), 255.0, 0.0];
        k += 1;
    }
    for i in 0..GC {
        wheel[k] = [0.0, 255.0, ramp(i, GC)];
        k += 1;
    }
    for i in 0..CB {
        wheel[k] = [0.0, 255.0 - ramp(i, CB), 255.0];
        k += 1;
    }
    for i in 0..BM {
        wheel[k] = [ramp(i, BM), 0.0, 255.0];
        k += 1;
    }
    for i in 0..MR {
        wheel[k] = [255.0, 0.0, 255.0 - ramp(i, MR)];
        k += 1;
    }
    wheel
}

/// Color of a normalized flow vector `(fx, fy)`.
fn compute_color(wheel: &[[f64; 3]; NCOLS], fx: f64, fy: f64) -> [u8; 3] {
    let rad = fx.hypot(fy);
    let a = (-fy).atan2(-fx) / PI;
    let fk = (a + 1.0) / 2.0 * (NCOLS - 1) as f64;
    let k0 = fk as usize; // fk >= 0
    let k1 = (k0 + 1) % NCOLS;
    let f = fk - k0 as f64;
    let mut pix = [0u8; 3];
    for (b, out) in pix.iter_mut().enumerate() {
        let col0 = wheel[k0 % NCOLS][b] / 255.0;
        let col1 = wheel[k1][b] / 255.0;
        let mut col = (1.0 - f) * col0 + f * col1;
        if rad <= 1.0 {
            col = 1.0 - rad * (1.0 - col);
        } else {
            col *= 0.75;
        }
        *out = (255.0 * col) as u8;
    }
    pix
}

/// Colorizes `flow`. `max_radius` defaults to the field's largest magnitude
/// (floored at 1e-9) so the longest vector is fully saturated.
pub fn flow_to_color(flow: &FlowField, max_radius: Option<f64>) -> Result<RgbFrame> {
    let radius = match max_radius {
        Some(r) if r.is_finite() && r > 0.0 => r,
        Some(r) => return Err(Error::invalid(format!("max_radius must be > 0, got {r}"))),
        None => flow.max_magnitude().max(1e-9),
    };
    let wheel = color_wheel();
    let data = flow
        .u()
        .iter()
        .zip(flow.v())
        .map(|(u, v)| compute_color(&wheel, u / radius, v / radius))
        .collect();
    RgbFrame::new(flow.width(), flow.height(), data)
}
