//! End-to-end two-stream assembly: motion and appearance features, final
//! representation, dataset manifests and evaluation protocols.

mod config;
mod eval;
mod manifest;
mod metrics;
mod report;
pub mod synthetic;


use rayon::prelude::*;

pub use config::{apply_config_file, apply_config_text, set_config_value, Preset};
pub use eval::{
    loocv, repeated_split, run_loocv, run_repeated_split, split_counts, split_indices, EvalReport,
    PredictionRecord,
};
pub use manifest::{DatasetManifest, ManifestEntry, VideoSource};
pub use metrics::{compute_metrics, Metrics};
pub use report::{render_kv, render_table};

use crate::descriptor::{describe_frame, describe_sequence, load_descriptor_matrix, middle_frame_index, DescriptorSpec};
use crate::error::{Error, Result};
use crate::frame::{read_rgb_dir, RgbFrame};
use crate::optflow::{flow_sequence, flow_to_color, HsParams};
use crate::pyramid::{encode, FeatureVector, PyramidConfig, THIRD_PERSON_LEVELS};
use crate::svm::{KernelSpec, TrainConfig};
use crate::timeseries::MultiChannelSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub flow: HsParams,
    /// Colorization radius; `None` normalizes each field by its own maximum.
    pub flow_max_radius: Option<f64>,
    pub motion_descriptor: DescriptorSpec,
    pub appearance_descriptor: DescriptorSpec,
    /// Append the appearance stream to the motion features.
    pub use_appearance: bool,
    pub pyramid: PyramidConfig,
    pub kernel: KernelSpec,
    pub train: TrainConfig,
    /// L1-normalize the motion and appearance blocks before concatenation.
    /// Off by default.
    pub normalize_blocks: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            flow: HsParams::default(),
            flow_max_radius: None,
            motion_descriptor: DescriptorSpec::default(),
            appearance_descriptor: DescriptorSpec::default(),
            use_appearance: true,
            pyramid: PyramidConfig::with_levels(THIRD_PERSON_LEVELS)
                .expect("default pyramid levels are in range"),
            kernel: KernelSpec::chi2_auto(),
            train: TrainConfig::default(),
            normalize_blocks: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.flow.validate()?;
        self.kernel.validate()?;
        self.train.validate()?;
        if let Some(r) = self.flow_max_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::config(format!("flow_max_radius must be > 0, got {r}")));
            }
        }
        Ok(())
    }
}

/// Descriptor series of the colorized flow between consecutive frames.
pub fn motion_series(frames: &[RgbFrame], config: &PipelineConfig) -> Result<MultiChannelSeries> {
    if frames.len() < 2 {
        return Err(Error::invalid(format!(
            "motion stream needs at least 2 frames, got {}",
            frames.len()
        )));
    }
    let gray: Vec<_> = frames.iter().map(RgbFrame::to_gray).collect();
    let flows = flow_sequence(&gray, &config.flow)?;
    let colored = flows
        .par_iter()
        .map(|f| flow_to_color(f, config.flow_max_radius))
        .collect::<Result<Vec<_>>>()?;
    describe_sequence(&colored, &config.motion_descriptor)
}

/// Motion stream feature vector: flow, colorization, description, PoT encoding.
pub fn motion_features(frames: &[RgbFrame], config: &PipelineConfig) -> Result<FeatureVector> {
    motion_features_from_series(&motion_series(frames, config)?, config)
}

/// Motion stream for a precomputed descriptor series (skips flow and description).
pub fn motion_features_from_series(
    series: &MultiChannelSeries,
    config: &PipelineConfig,
) -> Result<FeatureVector> {
    encode(series, &config.pyramid)
}

/// Appearance stream: descriptor of the middle frame.
pub fn appearance_features(frames: &[RgbFrame], config: &PipelineConfig) -> Result<FeatureVector> {
    let mid = middle_frame_index(frames.len())?;
    FeatureVector::new(describe_frame(&frames[mid], &config.appearance_descriptor)?)
}

/// Motion features followed by appearance features.
pub fn final_representation(frames: &[RgbFrame], config: &PipelineConfig) -> Result<FeatureVector> {
    extract_streams(frames, config)?.represent(config)
}

/// Expected final dimension for a motion stream of `motion_channels` channels.
pub fn representation_dim(
    motion_channels: usize,
    appearance_dim: usize,
    config: &PipelineConfig,
) -> usize {
    config.pyramid.encoded_dim(motion_channels)
        + if config.use_appearance { appearance_dim } else { 0 }
}

/// Per-video intermediate results, independent of the pyramid and classifier
/// settings, so several encodings can be compared without recomputing flow.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoStreams {
    pub motion: MultiChannelSeries,
    pub appearance: Option<FeatureVector>,
}

impl VideoStreams {
    pub fn represent(&self, config: &PipelineConfig) -> Result<FeatureVector> {
        let mut motion = motion_features_from_series(&self.motion, config)?;
        if config.normalize_blocks {
            motion = motion.l1_normalized();
        }
        if !config.use_appearance {
            return Ok(motion);
        }
        let appearance = self.appearance.as_ref().ok_or_else(|| {
            Error::invalid("appearance stream requested but the video provides none")
        })?;
        let appearance = if config.normalize_blocks {
            appearance.l1_normalized()
        } else {
            appearance.clone()
        };
        Ok(motion.concat(&appearance))
    }
}

/// Runs both streams on decoded frames.
pub fn extract_streams(frames: &[RgbFrame], config: &PipelineConfig) -> Result<VideoStreams> {
    let motion = motion_series(frames, config)?;
    let appearance = if config.use_appearance {
        Some(appearance_features(frames, config)?)
    } else {
        None
    };
    Ok(VideoStreams { motion, appearance })
}

/// Loads one manifest entry and runs (or bypasses) the streams.
pub fn extract_source(source: &VideoSource, config: &PipelineConfig) -> Result<VideoStreams> {
    match source {
        VideoSource::Frames(dir) => {
            let frames = read_rgb_dir(dir)?;
            if frames.is_empty() {
                return Err(Error::invalid(format!(
                    "no .pgm/.ppm frames in {}",
                    dir.display()
                )));
            }
            extract_streams(&frames, config)
        }
        VideoSource::Descriptors { motion, appearance } => {
            let motion = load_descriptor_matrix(motion)?;
            let appearance = appearance
                .as_ref()
                .map(|p| FeatureVector::load(p))
                .transpose()?;
            Ok(VideoStreams { motion, appearance })
        }
    }
}

/// Streams for every manifest entry, in manifest order. Videos are processed
/// in parallel.
pub fn extract_manifest(manifest: &DatasetManifest, config: &PipelineConfig) -> Result<Vec<VideoStreams>> {
    config.validate()?;
    manifest
        .entries()
        .par_iter()
        .map(|e| {
            extract_source(&e.source, config).map_err(|err| match err {
                Error::InvalidInput(m) => Error::InvalidInput(format!("video `{}`: {m}", e.video_id)),
                other => other,
            })
        })
        .collect()
}

/// Final representations for every manifest entry.
pub fn manifest_features(manifest: &DatasetManifest, config: &PipelineConfig) -> Result<Vec<FeatureVector>> {
    extract_manifest(manifest, config)?
        .iter()
        .map(|s| s.represent(config))
        .collect()
}
