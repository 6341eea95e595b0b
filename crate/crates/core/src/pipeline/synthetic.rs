//! Seeded synthetic motion clips: a textured square translating right, one
//! translating down, and a stationary square whose brightness flickers.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::manifest::{DatasetManifest, ManifestEntry, VideoSource};
use crate::error::{Error, Result};
use crate::frame::{write_ppm, RgbFrame};

pub const CLASSES: [&str; 3] = ["down", "flicker", "right"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub clips_per_class: usize,
    pub frames: usize,
    pub size: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            clips_per_class: 20,
            frames: 16,
            size: 64,
            seed: 2018,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticClip {
    pub id: String,
    pub label: String,
    pub frames: Vec<RgbFrame>,
}

#[derive(Clone, Copy)]
enum Motion {
    Right,
    Down,
    Flicker,
}

struct ClipParams {
    side: usize,
    x0: f64,
    y0: f64,
    speed: f64,
    tint: [f64; 3],
    phase: (f64, f64),
    period: f64,
}

fn background(x: usize, y: usize) -> f64 {
    let (x, y) = (x as f64, y as f64);
    0.3 + 0.04 * (x * 0.45).sin() * (y * 0.35).cos()
}

/// Texture inside the square, in square-local coordinates.
fn texture(p: &ClipParams, lx: f64, ly: f64) -> f64 {
    let w = std::f64::consts::TAU / p.period;
    0.7 + 0.12 * (w * lx + p.phase.0).sin() + 0.12 * (w * ly + p.phase.1).sin()
}

fn render(size: usize, p: &ClipParams, left: f64, top: f64, gain: f64) -> Result<RgbFrame> {
    let side = p.side as f64;
    RgbFrame::from_fn(size, size, |x, y| {
        let (lx, ly) = (x as f64 - left, y as f64 - top);
        let inside = (0.0..side).contains(&lx) && (0.0..side).contains(&ly);
        let rgb = if inside {
            let v = (texture(p, lx, ly) * gain).clamp(0.0, 1.0);
            [v * p.tint[0], v * p.tint[1], v * p.tint[2]]
        } else {
            let b = background(x, y);
            [b, b, b]
        };
        rgb.map(|c| (255.0 * c).round() as u8)
    })
}

fn clip(spec: &SyntheticSpec, motion: Motion, rng: &mut ChaCha8Rng) -> Result<Vec<RgbFrame>> {
    let size = spec.size;
    let side = rng.random_range(size / 5..=size * 5 / 16).max(2);
    let speed = rng.random_range(1..=2) as f64;
    let travel = speed * (spec.frames - 1) as f64;
    let slack = (size - side) as f64;
    let along = |rng: &mut ChaCha8Rng| {
        if travel < slack {
            rng.random_range(0.0..(slack - travel)).floor()
        } else {
            0.0
        }
    };
    let across = |rng: &mut ChaCha8Rng| rng.random_range(0.0..slack).floor();
    let (x0, y0) = match motion {
        Motion::Right => {
            let x = along(rng);
            (x, across(rng))
        }
        Motion::Down => {
            let x = across(rng);
            (x, along(rng))
        }
        Motion::Flicker => (across(rng), across(rng)),
    };
    let params = ClipParams {
        side,
        x0,
        y0,
        speed,
        tint: [
            rng.random_range(0.7..1.0),
            rng.random_range(0.7..1.0),
            rng.random_range(0.7..1.0),
        ],
        phase: (rng.random_range(0.0..std::f64::consts::TAU), rng.random_range(0.0..std::f64::consts::TAU)),
        period: rng.random_range(5.0..9.0),
    };
    (0..spec.frames)
        .map(|t| {
            let dt = t as f64 * params.speed;
            match motion {
                Motion::Right => render(size, &params, params.x0 + dt, params.y0, 1.0),
                Motion::Down => render(size, &params, params.x0, params.y0 + dt, 1.0),
                Motion::Flicker => {
                    let gain = rng.random_range(0.55..1.3);
                    render(size, &params, params.x0, params.y0, gain)
                }
            }
        })
        .collect()
}

/// Generates `clips_per_class` clips for each class, interleaved by class.
pub fn generate(spec: &SyntheticSpec) -> Result<Vec<SyntheticClip>> {
    if spec.frames < 2 || spec.size < 8 || spec.clips_per_class == 0 {
        return Err(Error::config(format!(
            "synthetic spec needs >= 2 frames, size >= 8 and >= 1 clip per class, got {spec:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut clips = Vec::with_capacity(3 * spec.clips_per_class);
    for k in 0..spec.clips_per_class {
        for (label, motion) in [
            ("right", Motion::Right),
            ("down", Motion::Down),
            ("flicker", Motion::Flicker),
        ] {
            clips.push(SyntheticClip {
                id: format!("{label}_{k:03}"),
                label: label.to_string(),
                frames: clip(spec, motion, &mut rng)?,
            });
        }
    }
    Ok(clips)
}

/// Writes each clip as a directory of PPM frames plus `manifest.tsv`.
/// Returns the manifest path.
pub fn write_dataset(clips: &[SyntheticClip], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(clips.len());
    for c in clips {
        let clip_dir = dir.join(&c.id);
        fs::create_dir_all(&clip_dir).map_err(|e| Error::io(&clip_dir, e))?;
        for (t, f) in c.frames.iter().enumerate() {
            write_ppm(f, &clip_dir.join(format!("frame_{t:04}.ppm")))?;
        }
        entries.push(ManifestEntry {
            video_id: c.id.clone(),
            source: VideoSource::Frames(clip_dir),
            label: c.label.clone(),
        });
    }
    let manifest = DatasetManifest::new(entries)?;
    let path = dir.join("manifest.tsv");
    fs::write(&path, manifest.to_text(dir)).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
