use rayon::prelude::*;

use super::FlowField;
use crate::error::{Error, Result};
use crate::frame::GrayFrame;

/// Horn-Schunck solver controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsParams {
    /// Smoothness weight; the update denominator is `alpha^2 + Ex^2 + Ey^2`.
    pub alpha: f64,
    pub max_iters: usize,
    /// Stop once the mean absolute per-component update drops below this.
    pub tol: f64,
}

impl Default for HsParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            max_iters: 200,
            tol: 1e-4,
        }
    }
}

impl HsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::config(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::config(format!("tol must be >= 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Spatio-temporal brightness derivatives, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub width: usize,
    pub height: usize,
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    pub et: Vec<f64>,
}

/// Solver output with convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct HsOutput {
    pub flow: FlowField,
    pub iterations: usize,
    pub final_mean_update: f64,
}

fn same_dims(f1: &GrayFrame, f2: &GrayFrame) -> Result<()> {
    if f1.width() != f2.width() || f1.height() != f2.height() {
        return Err(Error::invalid(format!(
            "frame dimensions differ: {}x{} vs {}x{}",
            f1.width(),
            f1.height(),
            f2.width(),
            f2.height()
        )));
    }
    Ok(())
}

/// First differences averaged over the 2x2x2 cube spanned by pixel `(x, y)`,
/// its right/lower neighbours and the two frames. Out-of-range neighbours
/// replicate the edge.
pub fn estimate_derivatives(f1: &GrayFrame, f2: &GrayFrame) -> Result<Derivatives> {
    same_dims(f1, f2)?;
    let (w, h) = (f1.width(), f1.height());
    let n = w * h;
    let (mut ex, mut ey, mut et) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for y in 0..h {
        let y1 = (y + 1).min(h - 1);
        for x in 0..w {
            let x1 = (x + 1).min(w - 1);
            // a = frame 1, b = frame 2; suffix: row offset, column offset.
            let (a00, a01, a10, a11) = (f1.get(x, y), f1.get(x1, y), f1.get(x, y1), f1.get(x1, y1));
            let (b00, b01, b10, b11) = (f2.get(x, y), f2.get(x1, y), f2.get(x, y1), f2.get(x1, y1));
            let i = y * w + x;
            ex[i] = 0.25 * ((a01 - a00) + (a11 - a10) + (b01 - b00) + (b11 - b10));
            ey[i] = 0.25 * ((a10 - a00) + (a11 - a01) + (b10 - b00) + (b11 - b01));
            et[i] = 0.25 * ((b00 - a00) + (b10 - a10) + (b01 - a01) + (b11 - a11));
        }
    }
    Ok(Derivatives {
        width: w,
        height: h,
        ex,
        ey,
        et,
    })
}

/// Weighted neighbourhood mean: 1/6 for the 4-neighbours, 1/12 for diagonals.
#[inline]
fn local_mean(f: &[f64], w: usize, h: usize, x: usize, y: usize) -> f64 {
    let xl = x.saturating_sub(1);
    let xr = (x + 1).min(w - 1);
    let yu = y.saturating_sub(1);
    let yd = (y + 1).min(h - 1);
    let at = |xx: usize, yy: usize| f[yy * w + xx];
    (at(xl, y) + at(xr, y) + at(x, yu) + at(x, yd)) / 6.0
        + (at(xl, yu) + at(xr, yu) + at(xl, yd) + at(xr, yd)) / 12.0
}

/// Dense Horn-Schunck flow from `f1` to `f2`.
///
/// Jacobi iteration from `u = v = 0`; every pixel's update reads only the
/// previous iterate, so row-parallel evaluation is bit-identical to a
/// sequential sweep. The mean update is reduced row by row in order.
pub fn horn_schunck(f1: &GrayFrame, f2: &GrayFrame, params: &HsParams) -> Result<HsOutput> {
    params.validate()?;
    let d = estimate_derivatives(f1, f2)?;
    let (w, h) = (d.width, d.height);
    let alpha2 = params.alpha * params.alpha;
    let denom: Vec<f64> = d
        .ex
        .iter()
        .zip(&d.ey)
        .map(|(gx, gy)| alpha2 + gx * gx + gy * gy)
        .collect();

    let mut u = vec![0.0; w * h];
    let mut v = vec![0.0; w * h];
    let mut u_next = vec![0.0; w * h];
    let mut v_next = vec![0.0; w * h];
    let mut iterations = 0;
    let mut mean_update = f64::INFINITY;

    while iterations < params.max_iters {
        let (u_prev, v_prev) = (&u, &v);
        let row_updates: Vec<f64> = u_next
            .par_chunks_mut(w)
            .zip(v_next.par_chunks_mut(w))
            .enumerate()
            .map(|(y, (u_row, v_row))| {
                let mut acc = 0.0;
                for x in 0..w {
                    let i = y * w + x;
                    let ub = local_mean(u_prev, w, h, x, y);
                    let vb = local_mean(v_prev, w, h, x, y);
                    let common = (d.ex[i] * ub + d.ey[i] * vb + d.et[i]) / denom[i];
                    u_row[x] = ub - d.ex[i] * common;
                    v_row[x] = vb - d.ey[i] * common;
                    acc += (u_row[x] - u_prev[i]).abs() + (v_row[x] - v_prev[i]).abs();
                }
                acc
            })
            .collect();
        std::mem::swap(&mut u, &mut u_next);
        std::mem::swap(&mut v, &mut v_next);
        iterations += 1;
        mean_update = row_updates.iter().sum::<f64>() / (2 * w * h) as f64;
        if mean_update < params.tol {
            break;
        }
    }

    Ok(HsOutput {
        flow: FlowField::new(w, h, u, v)?,
        iterations,
        final_mean_update: mean_update,
    })
}

/// Flow for every consecutive pair: `n` frames give `n - 1` fields.
pub fn flow_sequence(frames: &[GrayFrame], params: &HsParams) -> Result<Vec<FlowField>> {
    if frames.len() < 2 {
        return Err(Error::invalid(format!(
            "flow needs at least 2 frames, got {}",
            frames.len()
        )));
    }
    for f in &frames[1..] {
        same_dims(&frames[0], f)?;
    }
    frames
        .par_windows(2)
        .map(|pair| horn_schunck(&pair[0], &pair[1], params).map(|o| o.flow))
        .collect()
}
