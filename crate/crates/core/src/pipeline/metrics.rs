use crate::error::{Error, Result};

/// Classification metrics over a fixed, ordered label set.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub classes: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
}

impl Metrics {
    pub fn from_confusion(classes: Vec<String>, confusion: Vec<Vec<usize>>) -> Self {
        let k = classes.len();
        let total: usize = confusion.iter().flatten().sum();
        let trace: usize = (0..k).map(|i| confusion[i][i]).sum();
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let mut precision = Vec::with_capacity(k);
        let mut recall = Vec::with_capacity(k);
        let mut f1 = Vec::with_capacity(k);
        for (c, row) in confusion.iter().enumerate() {
            let tp = row[c];
            let predicted: usize = confusion.iter().map(|r| r[c]).sum();
            let actual: usize = row.iter().sum();
            let p = ratio(tp, predicted);
            let r = ratio(tp, actual);
            precision.push(p);
            recall.push(r);
            f1.push(if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) });
        }
        Self {
            classes,
            confusion,
            accuracy: ratio(trace, total),
            precision,
            recall,
            f1,
        }
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }
}

fn class_index(classes: &[String], label: &str) -> Result<usize> {
    classes
        .iter()
        .position(|c| c == label)
        .ok_or_else(|| Error::invalid(format!("label `{label}` is not in the label set")))
}

/// Accuracy, per-class precision/recall/F1 and the confusion matrix.
pub fn compute_metrics<T: AsRef<str>, P: AsRef<str>>(
    truth: &[T],
    predicted: &[P],
    classes: &[String],
) -> Result<Metrics> {
    if truth.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "{} true labels but {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    let k = classes.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for (t, p) in truth.iter().zip(predicted) {
        let ti = class_index(classes, t.as_ref())?;
        let pi = class_index(classes, p.as_ref())?;
        confusion[ti][pi] += 1;
    }
    Ok(Metrics::from_confusion(classes.to_vec(), confusion))
}
