//! Evaluation protocols: leave-one-out and repeated per-class half splits.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::metrics::{compute_metrics, Metrics};
use super::{manifest_features, DatasetManifest, PipelineConfig};
use crate::error::{Error, Result};
use crate::pyramid::FeatureVector;
use crate::svm::{predict, train, KernelSpec, TrainConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    /// Split run (always 0 for leave-one-out).
    pub run: usize,
    /// Position of the video in the dataset.
    pub index: usize,
    pub truth: String,
    pub predicted: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub protocol: String,
    /// Pooled over every prediction of every run.
    pub metrics: Metrics,
    /// Accuracy of each split run; a single entry for leave-one-out.
    pub run_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub predictions: Vec<PredictionRecord>,
}

fn class_groups(labels: &[String]) -> BTreeMap<&str, Vec<usize>> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l.as_str()).or_default().push(i);
    }
    groups
}

fn check_protocol_input(features: &[FeatureVector], labels: &[String]) -> Result<Vec<String>> {
    if features.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let groups = class_groups(labels);
    if groups.len() < 2 {
        return Err(Error::invalid(format!(
            "evaluation needs at least two classes, got {}",
            groups.len()
        )));
    }
    if let Some((c, idx)) = groups.iter().find(|(_, idx)| idx.len() < 2) {
        return Err(Error::invalid(format!(
            "class `{c}` has {} video(s); every class needs at least 2",
            idx.len()
        )));
    }
    Ok(groups.keys().map(|c| c.to_string()).collect())
}

fn vectors(features: &[FeatureVector], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| features[i].as_slice().to_vec()).collect()
}

/// Leave-one-out: each video is predicted by a model trained on all others.
pub fn loocv(
    features: &[FeatureVector],
    labels: &[String],
    kernel: &KernelSpec,
    train_config: &TrainConfig,
) -> Result<EvalReport> {
    let classes = check_protocol_input(features, labels)?;
    let n = features.len();
    let mut predicted = Vec::with_capacity(n);
    for held in 0..n {
        let idx: Vec<usize> = (0..n).filter(|&i| i != held).collect();
        let train_labels: Vec<&str> = idx.iter().map(|&i| labels[i].as_str()).collect();
        let model = train(&vectors(features, &idx), &train_labels, train_config, kernel)?;
        predicted.push(predict(&model, features[held].as_slice())?.label);
    }
    let metrics = compute_metrics(labels, &predicted, &classes)?;
    let predictions = labels
        .iter()
        .zip(predicted)
        .enumerate()
        .map(|(index, (truth, predicted))| PredictionRecord {
            run: 0,
            index,
            truth: truth.clone(),
            predicted,
        })
        .collect();
    Ok(EvalReport {
        protocol: "loocv".into(),
        mean_accuracy: metrics.accuracy,
        run_accuracies: vec![metrics.accuracy],
        metrics,
        predictions,
    })
}

/// `(train, test)` sizes for a class of `n` videos: an even class splits in
/// half, an odd class puts the extra video in the test half.
pub fn split_counts(n: usize) -> (usize, usize) {
    (n / 2, n - n / 2)
}

/// One seeded per-class split. Returns sorted `(train, test)` indices.
pub fn split_indices(labels: &[String], rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (_, mut idx) in class_groups(labels) {
        idx.shuffle(rng);
        let (n_train, _) = split_counts(idx.len());
        train_idx.extend_from_slice(&idx[..n_train]);
        test_idx.extend_from_slice(&idx[n_train..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    (train_idx, test_idx)
}

/// `runs` seeded random per-class splits; the report's pooled metrics cover
/// every test prediction of every run.
pub fn repeated_split(
    features: &[FeatureVector],
    labels: &[String],
    runs: usize,
    seed: u64,
    kernel: &KernelSpec,
    train_config: &TrainConfig,
) -> Result<EvalReport> {
    let classes = check_protocol_input(features, labels)?;
    if runs == 0 {
        return Err(Error::config("split protocol needs at least one run"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth_all = Vec::new();
    let mut pred_all = Vec::new();
    let mut predictions = Vec::new();
    let mut run_accuracies = Vec::with_capacity(runs);
    for run in 0..runs {
        let (train_idx, test_idx) = split_indices(labels, &mut rng);
        let train_labels: Vec<&str> = train_idx.iter().map(|&i| labels[i].as_str()).collect();
        let model = train(&vectors(features, &train_idx), &train_labels, train_config, kernel)?;
        let mut correct = 0usize;
        for &i in &test_idx {
            let p = predict(&model, features[i].as_slice())?.label;
            if p == labels[i] {
                correct += 1;
            }
            truth_all.push(labels[i].clone());
            pred_all.push(p.clone());
            predictions.push(PredictionRecord {
                run,
                index: i,
                truth: labels[i].clone(),
                predicted: p,
            });
        }
        run_accuracies.push(correct as f64 / test_idx.len() as f64);
    }
    let metrics = compute_metrics(&truth_all, &pred_all, &classes)?;
    let mean_accuracy = run_accuracies.iter().sum::<f64>() / runs as f64;
    Ok(EvalReport {
        protocol: "split".into(),
        metrics,
        run_accuracies,
        mean_accuracy,
        predictions,
    })
}

/// Extracts features for every video, then runs leave-one-out.
pub fn run_loocv(manifest: &DatasetManifest, config: &PipelineConfig) -> Result<EvalReport> {
    check_manifest(manifest)?;
    let features = manifest_features(manifest, config)?;
    loocv(&features, &manifest.labels(), &config.kernel, &config.train)
}

/// Extracts features for every video, then runs `runs` seeded splits.
pub fn run_repeated_split(
    manifest: &DatasetManifest,
    runs: usize,
    seed: u64,
    config: &PipelineConfig,
) -> Result<EvalReport> {
    check_manifest(manifest)?;
    if runs == 0 {
        return Err(Error::config("split protocol needs at least one run"));
    }
    let features = manifest_features(manifest, config)?;
    repeated_split(&features, &manifest.labels(), runs, seed, &config.kernel, &config.train)
}

/// Fails fast on degenerate manifests before any feature extraction.
fn check_manifest(manifest: &DatasetManifest) -> Result<()> {
    let counts = manifest.class_counts();
    if counts.len() < 2 {
        return Err(Error::invalid(format!(
            "evaluation needs at least two classes, got {}",
            counts.len()
        )));
    }
    if let Some((c, n)) = counts.iter().find(|(_, &n)| n < 2) {
        return Err(Error::invalid(format!(
            "class `{c}` has {n} video(s); every class needs at least 2"
        )));
    }
    Ok(())
}
