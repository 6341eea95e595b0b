//! Multi-channel time series and the pooling operators evaluated over
//! inclusive time windows.
//!
//! Gradient sums only look at differences strictly inside the window
//! (`t = start+1 ..= end`), so a window never reads samples outside its
//! bounds. Variance is the population variance over the window's samples.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `channels x length` real values, `f_i(t)`.
///
/// Stored channel-major so every pooling operator scans a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelSeries {
    channels: usize,
    length: usize,
    values: Vec<f64>,
}

impl MultiChannelSeries {
    /// Builds a series from one `Vec` per channel, all of equal length.
    pub fn from_channels(channels: Vec<Vec<f64>>) -> Result<Self> {
        let c = channels.len();
        if c == 0 {
            return Err(Error::invalid("series needs at least one channel"));
        }
        let t = channels[0].len();
        if t == 0 {
            return Err(Error::invalid("series needs at least one time step"));
        }
        if let Some(i) = channels.iter().position(|ch| ch.len() != t) {
            return Err(Error::invalid(format!(
                "channel {i} has length {} but channel 0 has {t}",
                channels[i].len()
            )));
        }
        let values: Vec<f64> = channels.into_iter().flatten().collect();
        Self::checked(c, t, values)
    }

    /// Builds a series from a row-major `length x channels` matrix (row = time step).
    pub fn from_time_major(length: usize, channels: usize, rows: &[f64]) -> Result<Self> {
        if channels == 0 || length == 0 {
            return Err(Error::invalid(format!(
                "series shape {channels}x{length} must be positive"
            )));
        }
        if rows.len() != channels * length {
            return Err(Error::invalid(format!(
                "expected {} values for {length} steps x {channels} channels, got {}",
                channels * length,
                rows.len()
            )));
        }
        let mut values = vec![0.0; rows.len()];
        for t in 0..length {
            for c in 0..channels {
                values[c * length + t] = rows[t * channels + c];
            }
        }
        Self::checked(channels, length, values)
    }

    fn checked(channels: usize, length: usize, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at channel {}, time {}",
                i / length,
                i % length
            )));
        }
        Ok(Self {
            channels,
            length,
            values,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn value(&self, channel: usize, t: usize) -> f64 {
        self.values[channel * self.length + t]
    }

    pub fn channel(&self, channel: usize) -> &[f64] {
        &self.values[channel * self.length..(channel + 1) * self.length]
    }

    /// Row-major `length x channels` copy (row = time step).
    pub fn to_time_major(&self) -> Vec<f64> {
        let mut rows = vec![0.0; self.values.len()];
        for c in 0..self.channels {
            for t in 0..self.length {
                rows[t * self.channels + c] = self.values[c * self.length + t];
            }
        }
        rows
    }

    /// The whole time domain `[0, length-1]`.
    pub fn full_window(&self) -> Window {
        Window {
            start: 0,
            end: self.length - 1,
        }
    }

    fn windowed(&self, channel: usize, window: Window) -> Result<&[f64]> {
        if channel >= self.channels {
            return Err(Error::invalid(format!(
                "channel {channel} out of range for {} channels",
                self.channels
            )));
        }
        window.check(self.length)?;
        Ok(&self.channel(channel)[window.start..=window.end])
    }
}

/// Inclusive time window `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start > end {
            return Err(Error::invalid(format!("window [{start}, {end}] is reversed")));
        }
        Ok(Self { start, end })
    }

    /// Number of samples covered, `end - start + 1`.
    pub fn sample_count(&self) -> usize {
        self.end - self.start + 1
    }

    fn check(&self, length: usize) -> Result<()> {
        if self.start > self.end || self.end >= length {
            return Err(Error::invalid(format!(
                "window [{}, {}] invalid for series of length {length}",
                self.start, self.end
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// A pooling operator tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolOp {
    Max,
    Sum,
    GradPos,
    GradNeg,
    Var,
}

impl PoolOp {
    pub const ALL: [PoolOp; 5] = [
        PoolOp::Max,
        PoolOp::Sum,
        PoolOp::GradPos,
        PoolOp::GradNeg,
        PoolOp::Var,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PoolOp::Max => "max",
            PoolOp::Sum => "sum",
            PoolOp::GradPos => "grad_pos",
            PoolOp::GradNeg => "grad_neg",
            PoolOp::Var => "var",
        }
    }

    fn apply(self, xs: &[f64]) -> f64 {
        match self {
            PoolOp::Max => max_of(xs),
            PoolOp::Sum => xs.iter().sum(),
            PoolOp::GradPos => xs.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum(),
            PoolOp::GradNeg => xs.windows(2).map(|w| (w[0] - w[1]).max(0.0)).sum(),
            PoolOp::Var => variance_of(xs),
        }
    }
}

impl fmt::Display for PoolOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PoolOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PoolOp::ALL
            .into_iter()
            .find(|op| op.tag() == s.trim())
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown pooling operator `{s}` (expected max, sum, grad_pos, grad_neg or var)"
                ))
            })
    }
}

/// Parses a comma-separated operator list such as `max,sum,var`.
pub fn parse_operator_order(s: &str) -> Result<Vec<PoolOp>> {
    let ops = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<PoolOp>>>()?;
    if ops.is_empty() {
        return Err(Error::config("operator order is empty"));
    }
    Ok(ops)
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Two-pass population variance, shifted by the first sample so a constant
/// window gives exactly 0.
fn variance_of(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let x0 = xs[0];
    let mean = xs.iter().map(|x| x - x0).sum::<f64>() / n;
    xs.iter()
        .map(|x| {
            let d = x - x0 - mean;
            d * d
        })
        .sum::<f64>()
        / n
}

/// Maximum of `f_channel` over the window.
pub fn pool_max(series: &MultiChannelSeries, channel: usize, window: Window) -> Result<f64> {
    pool(series, channel, window, PoolOp::Max)
}

/// Sum of `f_channel` over the window.
pub fn pool_sum(series: &MultiChannelSeries, channel: usize, window: Window) -> Result<f64> {
    pool(series, channel, window, PoolOp::Sum)
}

/// Sum of positive increments `f(t) - f(t-1)` for `t` in `start+1..=end`.
pub fn pool_grad_pos(series: &MultiChannelSeries, channel: usize, window: Window) -> Result<f64> {
    pool(series, channel, window, PoolOp::GradPos)
}

/// Sum of decrement magnitudes `f(t-1) - f(t)` for `t` in `start+1..=end`.
pub fn pool_grad_neg(series: &MultiChannelSeries, channel: usize, window: Window) -> Result<f64> {
    pool(series, channel, window, PoolOp::GradNeg)
}

/// Population variance of `f_channel` over the window.
pub fn pool_var(series: &MultiChannelSeries, channel: usize, window: Window) -> Result<f64> {
    pool(series, channel, window, PoolOp::Var)
}

/// Evaluates one operator on one channel.
pub fn pool(
    series: &MultiChannelSeries,
    channel: usize,
    window: Window,
    op: PoolOp,
) -> Result<f64> {
    Ok(op.apply(series.windowed(channel, window)?))
}

/// Every operator of `order` on every channel, laid out channel-major:
/// `[c0 op0, c0 op1, ..., c1 op0, ...]`.
pub fn pool_all(series: &MultiChannelSeries, window: Window, order: &[PoolOp]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(order.len() * series.channels());
    pool_all_into(series, window, order, &mut out)?;
    Ok(out)
}

pub(crate) fn pool_all_into(
    series: &MultiChannelSeries,
    window: Window,
    order: &[PoolOp],
    out: &mut Vec<f64>,
) -> Result<()> {
    if order.is_empty() {
        return Err(Error::config("operator order is empty"));
    }
    window.check(series.length())?;
    for c in 0..series.channels() {
        let xs = &series.channel(c)[window.start..=window.end];
        out.extend(order.iter().map(|op| op.apply(xs)));
    }
    Ok(())
}
