//! One-vs-rest kernel SVM over final feature vectors.
//!
//! Training vectors are rounded to `f32` precision on entry so that a model
//! written to disk (which stores vectors as `f32`) predicts exactly like the
//! in-memory model it came from.

mod io;
mod kernel;
mod smo;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use io::{decode_model, encode_model, read_model, write_model, MODEL_MAGIC, MODEL_VERSION};
pub use kernel::{auto_gamma, chi2_distance, gram_matrix, kernel_eval, Gamma, KernelSpec};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub c_reg: f64,
    pub kkt_tol: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c_reg: 1.0,
            kkt_tol: 1e-3,
            max_passes: 10,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_reg.is_finite() && self.c_reg > 0.0) {
            return Err(Error::config(format!("c_reg must be > 0, got {}", self.c_reg)));
        }
        if !(self.kkt_tol.is_finite() && self.kkt_tol > 0.0) {
            return Err(Error::config(format!("kkt_tol must be > 0, got {}", self.kkt_tol)));
        }
        if self.max_passes == 0 {
            return Err(Error::config("max_passes must be at least 1"));
        }
        Ok(())
    }
}

/// One class-vs-rest decision function `sum coef_i K(sv_i, x) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryModel {
    /// Indices into [`SvmModel::vectors`].
    pub support: Vec<usize>,
    /// `alpha_i * y_i`, so `|coef_i| <= c_reg`.
    pub coef: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub(crate) classes: Vec<String>,
    pub(crate) kernel: KernelSpec,
    pub(crate) c_reg: f64,
    pub(crate) dim: usize,
    pub(crate) vectors: Vec<Vec<f64>>,
    pub(crate) binaries: Vec<BinaryModel>,
}

impl SvmModel {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// The kernel with `gamma` resolved.
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn c_reg(&self) -> f64 {
        self.c_reg
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored support vectors, shared by all per-class models.
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Per-class models in [`classes`](Self::classes) order.
    pub fn binaries(&self) -> &[BinaryModel] {
        &self.binaries
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    /// Index of `label` in the model's class list.
    pub class_index: usize,
    /// Decision value per class, in model class order.
    pub scores: Vec<f64>,
}

fn round_f32(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| f64::from(x as f32)).collect()
}

/// Trains one binary SVM per class (class vs rest). Classes are ordered
/// lexicographically.
pub fn train<L: AsRef<str>>(
    features: &[Vec<f64>],
    labels: &[L],
    config: &TrainConfig,
    kernel: &KernelSpec,
) -> Result<SvmModel> {
    config.validate()?;
    if features.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let classes: Vec<String> = labels
        .iter()
        .map(|l| l.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if classes.len() < 2 {
        return Err(Error::invalid(format!(
            "training needs at least two classes, got {}",
            classes.len()
        )));
    }
    let dim = features[0].len();
    if let Some(i) = features.iter().position(|f| f.len() != dim) {
        return Err(Error::invalid(format!(
            "feature vector {i} has dimension {}, expected {dim}",
            features[i].len()
        )));
    }
    if let Some(i) = features.iter().position(|f| f.iter().any(|v| !v.is_finite())) {
        return Err(Error::invalid(format!("feature vector {i} has non-finite entries")));
    }

    let xs: Vec<Vec<f64>> = features.iter().map(|f| round_f32(f)).collect();
    let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
    let kernel = kernel.resolve(&refs)?;
    let gram = gram_matrix(&refs, &kernel)?;

    let params = smo::SmoParams {
        c: config.c_reg,
        kkt_tol: config.kkt_tol,
        max_passes: config.max_passes,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let solutions: Vec<smo::BinarySolution> = classes
        .iter()
        .map(|c| {
            let y: Vec<f64> = labels
                .iter()
                .map(|l| if l.as_ref() == c { 1.0 } else { -1.0 })
                .collect();
            smo::solve(&gram, &y, &params, &mut rng)
        })
        .collect();

    // Keep only vectors that support at least one class, remapping indices.
    let n = xs.len();
    let mut remap = vec![usize::MAX; n];
    let mut vectors = Vec::new();
    for i in 0..n {
        if solutions.iter().any(|s| s.alpha[i] > 0.0) {
            remap[i] = vectors.len();
            vectors.push(xs[i].clone());
        }
    }
    let binaries = classes
        .iter()
        .zip(&solutions)
        .map(|(c, sol)| {
            let mut support = Vec::new();
            let mut coef = Vec::new();
            for i in 0..n {
                if sol.alpha[i] > 0.0 {
                    let y = if labels[i].as_ref() == c { 1.0 } else { -1.0 };
                    support.push(remap[i]);
                    coef.push(sol.alpha[i] * y);
                }
            }
            BinaryModel {
                support,
                coef,
                bias: sol.bias,
            }
        })
        .collect();

    Ok(SvmModel {
        classes,
        kernel,
        c_reg: config.c_reg,
        dim,
        vectors,
        binaries,
    })
}

/// Per-class decision values and the argmax label (ties go to the earliest class).
pub fn predict(model: &SvmModel, x: &[f64]) -> Result<Prediction> {
    if x.len() != model.dim {
        return Err(Error::invalid(format!(
            "feature dimension {} does not match model dimension {}",
            x.len(),
            model.dim
        )));
    }
    let kvals: Vec<f64> = model
        .vectors
        .iter()
        .map(|sv| kernel_eval(sv, x, &model.kernel))
        .collect::<Result<_>>()?;
    let scores: Vec<f64> = model
        .binaries
        .iter()
        .map(|b| {
            b.support
                .iter()
                .zip(&b.coef)
                .map(|(&s, &c)| c * kvals[s])
                .sum::<f64>()
                + b.bias
        })
        .collect();
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(Prediction {
        label: model.classes[best].clone(),
        class_index: best,
        scores,
    })
}
