//! Two-stream (motion + appearance) video classification.
//!
//! Motion: Horn-Schunck flow between consecutive frames, colorized with the
//! Middlebury wheel, described per frame, stacked into a multi-channel time
//! series and summarized with temporal-pyramid pooling (max, sum, positive and
//! negative gradient sums, variance). Appearance: a descriptor of the middle
//! frame. The concatenation is classified with a one-vs-rest kernel SVM.

pub mod descriptor;
pub mod error;
pub mod frame;
pub mod optflow;
pub mod pipeline;
pub mod pmtx;
pub mod pyramid;
pub mod svm;
pub mod timeseries;

pub use error::{Error, Result};
pub use pyramid::{encode, pyramid_windows, FeatureVector, PyramidConfig};
pub use timeseries::{MultiChannelSeries, PoolOp, Window};
