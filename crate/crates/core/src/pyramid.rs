//! Temporal pyramid windows and pooled time-series (PoT) encoding.
//!
//! Level `L` (1-based) splits `[0, T-1]` into `2^(L-1)` contiguous segments,
//! segment `k` of `n` spanning `[floor(k*T/n), floor((k+1)*T/n) - 1]`. The
//! encoding concatenates, window-major in pyramid order, the channel-major
//! output of [`pool_all`](crate::timeseries::pool_all) for each window.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pmtx::Matrix;
use crate::timeseries::{pool_all_into, MultiChannelSeries, PoolOp, Window};

pub const MAX_LEVELS: usize = 16;

/// Pyramid depth used for first-person style footage (heavy ego-motion).
pub const FIRST_PERSON_LEVELS: usize = 4;
/// Pyramid depth used for third-person style footage.
pub const THIRD_PERSON_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct PyramidConfig {
    levels: usize,
    operator_order: Vec<PoolOp>,
}

impl PyramidConfig {
    pub fn new(levels: usize, operator_order: Vec<PoolOp>) -> Result<Self> {
        if !(1..=MAX_LEVELS).contains(&levels) {
            return Err(Error::config(format!(
                "pyramid levels must be in 1..={MAX_LEVELS}, got {levels}"
            )));
        }
        if operator_order.is_empty() {
            return Err(Error::config("operator order is empty"));
        }
        Ok(Self {
            levels,
            operator_order,
        })
    }

    /// `levels` with the default operator order `[max, sum, grad_pos, grad_neg, var]`.
    pub fn with_levels(levels: usize) -> Result<Self> {
        Self::new(levels, PoolOp::ALL.to_vec())
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn operator_order(&self) -> &[PoolOp] {
        &self.operator_order
    }

    /// Total window count `2^P - 1`.
    pub fn window_count(&self) -> usize {
        (1 << self.levels) - 1
    }

    /// Encoding dimension for a series with `channels` channels.
    pub fn encoded_dim(&self, channels: usize) -> usize {
        self.operator_order.len() * channels * self.window_count()
    }
}

/// Fixed-length real feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("feature entry {i} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &FeatureVector) -> FeatureVector {
        let mut v = Vec::with_capacity(self.dim() + other.dim());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        FeatureVector(v)
    }

    /// Divides by the L1 norm; an all-zero vector is left unchanged.
    pub fn l1_normalized(&self) -> FeatureVector {
        let norm: f64 = self.0.iter().map(|v| v.abs()).sum();
        if norm == 0.0 {
            return self.clone();
        }
        FeatureVector(self.0.iter().map(|v| v / norm).collect())
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        Matrix::from_f64(1, self.dim(), &self.0)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_matrix()?.write(path)
    }

    /// Loads a single-row PMTX file.
    pub fn load(path: &Path) -> Result<Self> {
        let m = Matrix::read(path)?;
        if m.rows != 1 {
            return Err(Error::format(
                8,
                format!("{}: feature vector file has {} rows, expected 1", path.display(), m.rows),
            ));
        }
        Ok(FeatureVector(m.to_f64()))
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.0
    }
}

/// Largest feasible pyramid depth for a series of length `t`.
pub fn max_levels_for(t: usize) -> usize {
    if t == 0 {
        return 0;
    }
    // 2^(P-1) <= t
    ((usize::BITS - t.leading_zeros()) as usize).min(MAX_LEVELS)
}

/// Level-major list of pyramid windows over `[0, t-1]`.
pub fn pyramid_windows(t: usize, levels: usize) -> Result<Vec<Window>> {
    if t == 0 {
        return Err(Error::invalid("series length must be at least 1"));
    }
    if !(1..=MAX_LEVELS).contains(&levels) {
        return Err(Error::invalid(format!(
            "pyramid levels must be in 1..={MAX_LEVELS}, got {levels}"
        )));
    }
    let max = max_levels_for(t);
    if levels > max {
        return Err(Error::invalid(format!(
            "series of length {t} is too short for {levels} pyramid levels \
             (level {levels} needs {} samples); at most {max} levels are feasible",
            1usize << (levels - 1)
        )));
    }
    let mut windows = Vec::with_capacity((1 << levels) - 1);
    for level in 0..levels {
        let n = 1usize << level;
        for k in 0..n {
            let start = k * t / n;
            let end = (k + 1) * t / n - 1;
            windows.push(Window { start, end });
        }
    }
    Ok(windows)
}

/// PoT encoding of `series` under `config`.
pub fn encode(series: &MultiChannelSeries, config: &PyramidConfig) -> Result<FeatureVector> {
    let windows = pyramid_windows(series.length(), config.levels())?;
    let mut out = Vec::with_capacity(config.encoded_dim(series.channels()));
    for w in windows {
        pool_all_into(series, w, config.operator_order(), &mut out)?;
    }
    debug_assert_eq!(out.len(), config.encoded_dim(series.channels()));
    FeatureVector::new(out)
}
