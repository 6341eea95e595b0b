use std::fmt::Write as _;

use super::EvalReport;

/// Human-readable summary: accuracy, per-class table and confusion matrix.
pub fn render_table(r: &EvalReport) -> String {
    let m = &r.metrics;
    let mut out = String::new();
    let width = m.classes.iter().map(String::len).max().unwrap_or(5).max(5);
    let _ = writeln!(out, "protocol: {}", r.protocol);
    if r.run_accuracies.len() > 1 {
        let _ = writeln!(
            out,
            "runs: {}  mean accuracy: {:.2}%",
            r.run_accuracies.len(),
            100.0 * r.mean_accuracy
        );
    }
    let _ = writeln!(
        out,
        "accuracy: {:.2}% ({} predictions)\n",
        100.0 * m.accuracy,
        m.total()
    );
    let _ = writeln!(out, "{:<width$}  precision  recall     f1", "class");
    for (i, c) in m.classes.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:<width$}  {:>9.4}  {:>6.4}  {:>6.4}",
            c, m.precision[i], m.recall[i], m.f1[i]
        );
    }
    let _ = writeln!(out, "\nconfusion (rows = true, cols = predicted)");
    let _ = write!(out, "{:<width$}", "");
    for c in &m.classes {
        let _ = write!(out, "  {c:>width$}");
    }
    out.push('\n');
    for (i, c) in m.classes.iter().enumerate() {
        let _ = write!(out, "{c:<width$}");
        for n in &m.confusion[i] {
            let _ = write!(out, "  {n:>width$}");
        }
        out.push('\n');
    }
    out
}

/// Machine-readable `key=value` lines.
pub fn render_kv(r: &EvalReport) -> String {
    let m = &r.metrics;
    let mut out = String::new();
    let _ = writeln!(out, "protocol={}", r.protocol);
    let _ = writeln!(out, "predictions={}", m.total());
    let _ = writeln!(out, "accuracy={}", m.accuracy);
    let _ = writeln!(out, "runs={}", r.run_accuracies.len());
    let _ = writeln!(out, "mean_accuracy={}", r.mean_accuracy);
    for (k, a) in r.run_accuracies.iter().enumerate() {
        let _ = writeln!(out, "run_accuracy.{k}={a}");
    }
    let _ = writeln!(out, "classes={}", m.classes.join(","));
    for (i, c) in m.classes.iter().enumerate() {
        let _ = writeln!(out, "precision.{c}={}", m.precision[i]);
        let _ = writeln!(out, "recall.{c}={}", m.recall[i]);
        let _ = writeln!(out, "f1.{c}={}", m.f1[i]);
    }
    for (i, t) in m.classes.iter().enumerate() {
        for (j, p) in m.classes.iter().enumerate() {
            let _ = writeln!(out, "confusion.{t}.{p}={}", m.confusion[i][j]);
        }
    }
    out
}
