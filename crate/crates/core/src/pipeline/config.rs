//! `key = value` overrides for [`PipelineConfig`].
//!
//! Descriptor keys (`cells_x`, `cells_y`, `bins`, `mean_color`) apply to both
//! streams; prefix them with `motion.` or `appearance.` to target one.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::PipelineConfig;
use crate::descriptor::{DescriptorSpec, GridParams};
use crate::error::{Error, Result};
use crate::pyramid::{PyramidConfig, FIRST_PERSON_LEVELS, THIRD_PERSON_LEVELS};
use crate::svm::{Gamma, KernelSpec};
use crate::timeseries::parse_operator_order;

/// Named pyramid depths for the two kinds of footage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Wearable-camera footage: 4 pyramid levels.
    FirstPerson,
    /// Static or mostly static camera: 3 pyramid levels.
    ThirdPerson,
}

impl Preset {
    pub fn levels(self) -> usize {
        match self {
            Preset::FirstPerson => FIRST_PERSON_LEVELS,
            Preset::ThirdPerson => THIRD_PERSON_LEVELS,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-person" => Ok(Preset::FirstPerson),
            "third-person" => Ok(Preset::ThirdPerson),
            _ => Err(Error::config(format!(
                "unknown preset `{s}` (expected first-person or third-person)"
            ))),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

fn grid_mut<'a>(spec: &'a mut DescriptorSpec, key: &str) -> Result<&'a mut GridParams> {
    match spec {
        DescriptorSpec::Builtin(g) => Ok(g),
        DescriptorSpec::External(_) => Err(Error::config(format!(
            "`{key}` does not apply to an external descriptor"
        ))),
    }
}

fn set_grid(spec: &mut DescriptorSpec, key: &str, field: &str, value: &str) -> Result<()> {
    let g = grid_mut(spec, key)?;
    match field {
        "cells_x" => g.cells_x = parse(key, value)?,
        "cells_y" => g.cells_y = parse(key, value)?,
        "bins" => g.orientation_bins = parse(key, value)?,
        "mean_color" => g.include_mean_color = parse_bool(key, value)?,
        _ => return Err(Error::config(format!("unknown config key `{key}`"))),
    }
    g.validate()
}

/// Applies a single override.
pub fn set_config_value(config: &mut PipelineConfig, key: &str, value: &str) -> Result<()> {
    let (key, value) = (key.trim(), value.trim());
    match key {
        "alpha" => config.flow.alpha = parse(key, value)?,
        "iters" => config.flow.max_iters = parse(key, value)?,
        "tol" => config.flow.tol = parse(key, value)?,
        "flow_max_radius" => {
            config.flow_max_radius = match value {
                "auto" => None,
                v => Some(parse(key, v)?),
            }
        }
        "pyramid_levels" => {
            config.pyramid =
                PyramidConfig::new(parse(key, value)?, config.pyramid.operator_order().to_vec())?
        }
        "preset" => {
            let p: Preset = value.parse()?;
            config.pyramid =
                PyramidConfig::new(p.levels(), config.pyramid.operator_order().to_vec())?
        }
        "operators" => {
            config.pyramid = PyramidConfig::new(config.pyramid.levels(), parse_operator_order(value)?)?
        }
        "kernel" => {
            config.kernel = match value {
                "linear" => KernelSpec::Linear,
                "chi2" => match config.kernel {
                    k @ KernelSpec::Chi2 { .. } => k,
                    KernelSpec::Linear => KernelSpec::chi2_auto(),
                },
                _ => {
                    return Err(Error::config(format!(
                        "unknown kernel `{value}` (expected linear or chi2)"
                    )))
                }
            }
        }
        "gamma" => {
            let gamma = match value {
                "auto" => Gamma::Auto,
                v => Gamma::Fixed(parse(key, v)?),
            };
            config.kernel = KernelSpec::Chi2 { gamma };
        }
        "c_reg" => config.train.c_reg = parse(key, value)?,
        "kkt_tol" => config.train.kkt_tol = parse(key, value)?,
        "max_passes" => config.train.max_passes = parse(key, value)?,
        "seed" => config.train.seed = parse(key, value)?,
        "appearance" => config.use_appearance = parse_bool(key, value)?,
        "normalize_blocks" => config.normalize_blocks = parse_bool(key, value)?,
        _ => {
            if let Some(field) = key.strip_prefix("motion.") {
                set_grid(&mut config.motion_descriptor, key, field, value)?;
            } else if let Some(field) = key.strip_prefix("appearance.") {
                set_grid(&mut config.appearance_descriptor, key, field, value)?;
            } else {
                set_grid(&mut config.motion_descriptor, key, key, value)?;
                set_grid(&mut config.appearance_descriptor, key, key, value)?;
            }
        }
    }
    Ok(())
}

/// Applies every `key = value` line of `text`; `#` starts a comment.
pub fn apply_config_text(config: &mut PipelineConfig, text: &str) -> Result<()> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("config line {}: expected `key = value`", lineno + 1))
        })?;
        set_config_value(config, k, v)
            .map_err(|e| Error::config(format!("config line {}: {e}", lineno + 1)))?;
    }
    config.validate()
}

pub fn apply_config_file(config: &mut PipelineConfig, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    apply_config_text(config, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::PoolOp;

    #[test]
    fn overrides() {
        let mut c = PipelineConfig::default();
        apply_config_text(
            &mut c,
            "alpha = 0.5\niters=50 # fewer\n\npyramid_levels=4\noperators=max,sum,grad_pos,grad_neg\n\
             kernel=chi2\ngamma=0.25\nc_reg=10\nseed=3\nmotion.cells_x=2\nbins=6\nappearance=off\n",
        )
        .unwrap();
        assert_eq!(c.flow.alpha, 0.5);
        assert_eq!(c.flow.max_iters, 50);
        assert_eq!(c.pyramid.levels(), 4);
        assert_eq!(c.pyramid.operator_order().len(), 4);
        assert!(!c.pyramid.operator_order().contains(&PoolOp::Var));
        assert_eq!(c.kernel, KernelSpec::Chi2 { gamma: Gamma::Fixed(0.25) });
        assert_eq!(c.train.c_reg, 10.0);
        assert_eq!(c.train.seed, 3);
        assert!(!c.use_appearance);
        let DescriptorSpec::Builtin(m) = c.motion_descriptor else { panic!() };
        let DescriptorSpec::Builtin(a) = c.appearance_descriptor else { panic!() };
        assert_eq!((m.cells_x, m.orientation_bins), (2, 6));
        assert_eq!((a.cells_x, a.orientation_bins), (4, 6));
    }

    #[test]
    fn presets() {
        let mut c = PipelineConfig::default();
        set_config_value(&mut c, "preset", "first-person").unwrap();
        assert_eq!(c.pyramid.levels(), 4);
        set_config_value(&mut c, "preset", "third-person").unwrap();
        assert_eq!(c.pyramid.levels(), 3);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = PipelineConfig::default();
        assert!(set_config_value(&mut c, "bogus", "1").is_err());
        assert!(set_config_value(&mut c, "alpha", "abc").is_err());
        assert!(set_config_value(&mut c, "operators", "max,median").is_err());
        assert!(set_config_value(&mut c, "pyramid_levels", "0").is_err());
        assert!(set_config_value(&mut c, "kernel", "rbf").is_err());
        assert!(set_config_value(&mut c, "cells_x", "0").is_err());
        assert!(apply_config_text(&mut c, "alpha 3").is_err());
        assert!(apply_config_text(&mut c, "alpha=-1").is_err());
    }
}
