//! Independent reference implementations used as test oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twostream::frame::GrayFrame;

/// Brute-force pooling of `x[s..=e]`, one loop per operator.
pub fn oracle_max(x: &[f64], s: usize, e: usize) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for t in s..=e {
        if x[t] > m {
            m = x[t];
        }
    }
    m
}

pub fn oracle_sum(x: &[f64], s: usize, e: usize) -> f64 {
    let mut acc = 0.0;
    for t in s..=e {
        acc += x[t];
    }
    acc
}

pub fn oracle_grad_pos(x: &[f64], s: usize, e: usize) -> f64 {
    let mut acc = 0.0;
    for t in s + 1..=e {
        let d = x[t] - x[t - 1];
        if d > 0.0 {
            acc += d;
        }
    }
    acc
}

pub fn oracle_grad_neg(x: &[f64], s: usize, e: usize) -> f64 {
    let mut acc = 0.0;
    for t in s + 1..=e {
        let d = x[t - 1] - x[t];
        if d > 0.0 {
            acc += d;
        }
    }
    acc
}

/// Population variance, two-pass.
pub fn oracle_var(x: &[f64], s: usize, e: usize) -> f64 {
    let n = (e - s + 1) as f64;
    let mean = oracle_sum(x, s, e) / n;
    let mut acc = 0.0;
    for t in s..=e {
        acc += (x[t] - mean) * (x[t] - mean);
    }
    acc / n
}

/// All five in the default order `[max, sum, grad_pos, grad_neg, var]`.
pub fn oracle_all(x: &[f64], s: usize, e: usize) -> [f64; 5] {
    [
        oracle_max(x, s, e),
        oracle_sum(x, s, e),
        oracle_grad_pos(x, s, e),
        oracle_grad_neg(x, s, e),
        oracle_var(x, s, e),
    ]
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Plain sequential Horn-Schunck on an edge-padded grid.
pub struct RefFlow {
    pub w: usize,
    pub h: usize,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub iterations: usize,
}

fn padded(f: &GrayFrame) -> Vec<Vec<f64>> {
    // one extra row/column on every side, replicating the border
    let (w, h) = (f.width() as isize, f.height() as isize);
    (-1..=h)
        .map(|y| {
            (-1..=w)
                .map(|x| f.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize))
                .collect()
        })
        .collect()
}

fn pad_field(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let h = a.len() as isize;
    let w = a[0].len() as isize;
    (-1..=h)
        .map(|y| {
            (-1..=w)
                .map(|x| a[y.clamp(0, h - 1) as usize][x.clamp(0, w - 1) as usize])
                .collect()
        })
        .collect()
}

pub fn reference_hs(f1: &GrayFrame, f2: &GrayFrame, alpha: f64, iters: usize, tol: f64) -> RefFlow {
    let (w, h) = (f1.width(), f1.height());
    let a = padded(f1);
    let b = padded(f2);
    let mut ex = vec![vec![0.0; w]; h];
    let mut ey = vec![vec![0.0; w]; h];
    let mut et = vec![vec![0.0; w]; h];
    for y in 0..h {
        for x in 0..w {
            let (py, px) = (y + 1, x + 1);
            let g = |m: &Vec<Vec<f64>>, dy: usize, dx: usize| m[py + dy][px + dx];
            ex[y][x] = (g(&a, 0, 1) - g(&a, 0, 0) + g(&a, 1, 1) - g(&a, 1, 0)
                + g(&b, 0, 1) - g(&b, 0, 0) + g(&b, 1, 1) - g(&b, 1, 0))
                / 4.0;
            ey[y][x] = (g(&a, 1, 0) - g(&a, 0, 0) + g(&a, 1, 1) - g(&a, 0, 1)
                + g(&b, 1, 0) - g(&b, 0, 0) + g(&b, 1, 1) - g(&b, 0, 1))
                / 4.0;
            et[y][x] = (g(&b, 0, 0) - g(&a, 0, 0) + g(&b, 1, 0) - g(&a, 1, 0)
                + g(&b, 0, 1) - g(&a, 0, 1) + g(&b, 1, 1) - g(&a, 1, 1))
                / 4.0;
        }
    }
    let mut u = vec![vec![0.0; w]; h];
    let mut v = vec![vec![0.0; w]; h];
    let mut iterations = 0;
    for _ in 0..iters {
        let pu = pad_field(&u);
        let pv = pad_field(&v);
        let avg = |p: &Vec<Vec<f64>>, y: usize, x: usize| {
            let (y, x) = (y + 1, x + 1);
            (p[y][x - 1] + p[y][x + 1] + p[y - 1][x] + p[y + 1][x]) / 6.0
                + (p[y - 1][x - 1] + p[y - 1][x + 1] + p[y + 1][x - 1] + p[y + 1][x + 1]) / 12.0
        };
        let mut change = 0.0;
        let mut nu = vec![vec![0.0; w]; h];
        let mut nv = vec![vec![0.0; w]; h];
        for y in 0..h {
            for x in 0..w {
                let (ub, vb) = (avg(&pu, y, x), avg(&pv, y, x));
                let k = (ex[y][x] * ub + ey[y][x] * vb + et[y][x])
                    / (alpha * alpha + ex[y][x] * ex[y][x] + ey[y][x] * ey[y][x]);
                nu[y][x] = ub - ex[y][x] * k;
                nv[y][x] = vb - ey[y][x] * k;
                change += (nu[y][x] - u[y][x]).abs() + (nv[y][x] - v[y][x]).abs();
            }
        }
        u = nu;
        v = nv;
        iterations += 1;
        if change / ((2 * w * h) as f64) < tol {
            break;
        }
    }
    RefFlow { w, h, u, v, iterations }
}

/// Mean of `u` and of `|v|` over the central region, `margin` pixels in from each edge.
pub fn central_means(w: usize, h: usize, margin: usize, u: impl Fn(usize, usize) -> f64, v: impl Fn(usize, usize) -> f64) -> (f64, f64) {
    let (mut su, mut sv, mut n) = (0.0, 0.0, 0.0);
    for y in margin..h - margin {
        for x in margin..w - margin {
            su += u(x, y);
            sv += v(x, y).abs();
            n += 1.0;
        }
    }
    (su / n, sv / n)
}

pub const SINUSOID_SIZE: usize = 64;
pub const SINUSOID_WAVELENGTH: f64 = 8.0;

/// Smooth additive sinusoid, values within [0, 1].
pub fn sinusoid(x: f64, y: f64) -> f64 {
    let k = TAU / SINUSOID_WAVELENGTH;
    0.5 + 0.25 * (k * x).sin() + 0.25 * (k * y).sin()
}

/// Pair `(f1, f2)` with `f2(x, y) = f1(x - dx, y - dy)`.
pub fn sinusoid_pair(dx: f64, dy: f64) -> (GrayFrame, GrayFrame) {
    let n = SINUSOID_SIZE;
    let f1 = GrayFrame::from_fn(n, n, |x, y| sinusoid(x as f64, y as f64)).unwrap();
    let f2 = GrayFrame::from_fn(n, n, |x, y| sinusoid(x as f64 - dx, y as f64 - dy)).unwrap();
    (f1, f2)
}

/// Leave-one-out nearest-centroid accuracy (Euclidean).
pub fn nearest_centroid_loocv(points: &[Vec<f64>], labels: &[String]) -> f64 {
    let mut classes: Vec<&String> = labels.iter().collect();
    classes.sort();
    classes.dedup();
    let mut correct = 0;
    for held in 0..points.len() {
        let mut best: Option<(f64, &String)> = None;
        for c in &classes {
            let members: Vec<&Vec<f64>> = (0..points.len())
                .filter(|&i| i != held && &labels[i] == *c)
                .map(|i| &points[i])
                .collect();
            let d = points[held].len();
            let centroid: Vec<f64> = (0..d)
                .map(|k| members.iter().map(|p| p[k]).sum::<f64>() / members.len() as f64)
                .collect();
            let dist: f64 = centroid
                .iter()
                .zip(&points[held])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if best.is_none_or(|(bd, _)| dist < bd) {
                best = Some((dist, c));
            }
        }
        if best.unwrap().1 == &labels[held] {
            correct += 1;
        }
    }
    correct as f64 / points.len() as f64
}

/// 2-D blobs around three well separated centres.
pub fn blobs(seed: u64, per_class: usize) -> (Vec<Vec<f64>>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres = [("a", 0.0, 0.0), ("b", 4.0, 0.0), ("c", 2.0, 3.5)];
    let mut x = Vec::new();
    let mut y = Vec::new();
    for _ in 0..per_class {
        for (label, cx, cy) in centres {
            x.push(vec![cx + rng.random_range(-0.8..0.8), cy + rng.random_range(-0.8..0.8)]);
            y.push(label.to_string());
        }
    }
    (x, y)
}

/// Scans 3600 directions for a line separating `class` from the rest.
pub fn separable_one_vs_rest(x: &[Vec<f64>], y: &[String], class: &str) -> bool {
    (0..3600).any(|k| {
        let t = k as f64 * std::f64::consts::TAU / 3600.0;
        let proj = |p: &Vec<f64>| p[0] * t.cos() + p[1] * t.sin();
        let inside = x.iter().zip(y).filter(|(_, l)| *l == class).map(|(p, _)| proj(p));
        let outside = x.iter().zip(y).filter(|(_, l)| *l != class).map(|(p, _)| proj(p));
        let in_max = inside.fold(f64::NEG_INFINITY, f64::max);
        let out_min = outside.fold(f64::INFINITY, f64::min);
        in_max < out_min
    })
}
