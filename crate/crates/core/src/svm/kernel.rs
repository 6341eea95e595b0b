use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Chi-squared bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// `1 / mean pairwise chi-squared distance` of the training set.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    /// `exp(-gamma * sum (x - y)^2 / (x + y))` over nonnegative inputs.
    Chi2 { gamma: Gamma },
}

impl KernelSpec {
    pub fn chi2_auto() -> Self {
        KernelSpec::Chi2 { gamma: Gamma::Auto }
    }

    pub fn validate(&self) -> Result<()> {
        if let KernelSpec::Chi2 {
            gamma: Gamma::Fixed(g),
        } = self
        {
            if !(g.is_finite() && *g > 0.0) {
                return Err(Error::config(format!("chi2 gamma must be > 0, got {g}")));
            }
        }
        Ok(())
    }

    /// Replaces `Gamma::Auto` with the value derived from `vectors`.
    pub fn resolve(&self, vectors: &[&[f64]]) -> Result<KernelSpec> {
        self.validate()?;
        match self {
            KernelSpec::Chi2 { gamma: Gamma::Auto } => Ok(KernelSpec::Chi2 {
                gamma: Gamma::Fixed(auto_gamma(vectors)?),
            }),
            other => Ok(*other),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => f.write_str("linear"),
            KernelSpec::Chi2 { gamma: Gamma::Auto } => f.write_str("chi2(gamma=auto)"),
            KernelSpec::Chi2 {
                gamma: Gamma::Fixed(g),
            } => write!(f, "chi2(gamma={g})"),
        }
    }
}

/// `sum (x_j - y_j)^2 / (x_j + y_j)`, skipping terms with `x_j + y_j = 0`.
pub fn chi2_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    let mut d = 0.0;
    for (j, (&a, &b)) in x.iter().zip(y).enumerate() {
        if a < 0.0 || b < 0.0 {
            return Err(Error::invalid(format!(
                "chi2 kernel needs nonnegative features; entry {j} is {}",
                a.min(b)
            )));
        }
        let s = a + b;
        if s > 0.0 {
            d += (a - b) * (a - b) / s;
        }
    }
    Ok(d)
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "feature dimensions differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// `1 / max(mean pairwise chi2 distance, 1e-12)` over all unordered pairs.
pub fn auto_gamma(vectors: &[&[f64]]) -> Result<f64> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::invalid("auto gamma needs at least two vectors"));
    }
    let row_sums: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| chi2_distance(vectors[i], vectors[j]))
                .sum::<Result<f64>>()
        })
        .collect::<Result<_>>()?;
    let pairs = (n * (n - 1) / 2) as f64;
    let mean = row_sums.iter().sum::<f64>() / pairs;
    Ok(1.0 / mean.max(1e-12))
}

/// Evaluates `spec` on one pair. `Gamma::Auto` must be resolved first.
pub fn kernel_eval(x: &[f64], y: &[f64], spec: &KernelSpec) -> Result<f64> {
    check_dims(x, y)?;
    match spec {
        KernelSpec::Linear => Ok(x.iter().zip(y).map(|(a, b)| a * b).sum()),
        KernelSpec::Chi2 {
            gamma: Gamma::Fixed(g),
        } => Ok((-g * chi2_distance(x, y)?).exp()),
        KernelSpec::Chi2 { gamma: Gamma::Auto } => Err(Error::config(
            "chi2 gamma=auto must be resolved against training data before evaluation",
        )),
    }
}

/// Symmetric Gram matrix, row-major. Rows are computed in parallel; each
/// entry is evaluated once and mirrored.
pub fn gram_matrix(vectors: &[&[f64]], spec: &KernelSpec) -> Result<Vec<f64>> {
    let n = vectors.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| kernel_eval(vectors[i], vectors[j], spec))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut k = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &val) in row.iter().enumerate() {
            let j = i + off;
            k[i * n + j] = val;
            k[j * n + i] = val;
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHI2_ONE: KernelSpec = KernelSpec::Chi2 {
        gamma: Gamma::Fixed(1.0),
    };

    #[test]
    fn chi2_self_similarity_is_one() {
        let x = [0.0, 0.3, 2.0, 0.0];
        assert_eq!(kernel_eval(&x, &x, &CHI2_ONE).unwrap(), 1.0);
    }

    #[test]
    fn linear_on_basis() {
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0];
        assert_eq!(kernel_eval(&e1, &e1, &KernelSpec::Linear).unwrap(), 1.0);
        assert_eq!(kernel_eval(&e1, &e2, &KernelSpec::Linear).unwrap(), 0.0);
    }

    #[test]
    fn chi2_hand_value() {
        // (1-0)^2/1 + (1-3)^2/4 = 2
        let d = chi2_distance(&[1.0, 1.0, 0.0], &[0.0, 3.0, 0.0]).unwrap();
        assert_eq!(d, 2.0);
        let k = kernel_eval(&[1.0, 1.0, 0.0], &[0.0, 3.0, 0.0], &CHI2_ONE).unwrap();
        assert!((k - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(kernel_eval(&[1.0], &[1.0, 2.0], &KernelSpec::Linear).is_err());
        assert!(matches!(
            kernel_eval(&[-0.1], &[1.0], &CHI2_ONE),
            Err(Error::InvalidInput(_))
        ));
        assert!(kernel_eval(&[1.0], &[1.0], &KernelSpec::chi2_auto()).is_err());
        assert!(KernelSpec::Chi2 { gamma: Gamma::Fixed(0.0) }.validate().is_err());
    }

    #[test]
    fn auto_gamma_value() {
        let a = [1.0, 0.0];
        let b = [0.0, 1.0];
        let c = [1.0, 0.0];
        // distances: ab = 2, ac = 0, bc = 2 -> mean 4/3
        let g = auto_gamma(&[&a, &b, &c]).unwrap();
        assert!((g - 0.75).abs() < 1e-15);
        // all identical -> floor
        assert_eq!(auto_gamma(&[&a, &a]).unwrap(), 1e12);
    }

    #[test]
    fn gram_is_symmetric() {
        let xs: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..4).map(|j| ((i * 7 + j * 3) % 5) as f64).collect())
            .collect();
        let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let k = gram_matrix(&refs, &CHI2_ONE).unwrap();
        for i in 0..6 {
            assert_eq!(k[i * 6 + i], 1.0);
            for j in 0..6 {
                assert_eq!(k[i * 6 + j], k[j * 6 + i]);
                assert!(k[i * 6 + j] > 0.0 && k[i * 6 + j] <= 1.0);
            }
        }
    }
}
