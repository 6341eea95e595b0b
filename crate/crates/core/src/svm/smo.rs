//! Binary soft-margin SVM dual solved by sequential minimal optimization over
//! a precomputed Gram matrix.
//!
//! Sweeps visit examples in a seeded random order. For every example that
//! violates the KKT conditions by more than `kkt_tol`, the partner is the
//! example whose clipped pair step gives the largest dual decrease (scan
//! order breaks ties). Training ends after `max_passes` consecutive sweeps
//! without a significant step.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

/// Curvature floor for the pair step; keeps flat directions well defined.
const TAU: f64 = 1e-12;
/// Relative change below which a pair step does not count as progress.
const STEP_EPS: f64 = 1e-3;
/// Hard cap on sweeps so pathological inputs still terminate.
const MAX_SWEEPS: usize = 20_000;

pub(crate) struct BinarySolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
}

pub(crate) struct SmoParams {
    pub c: f64,
    pub kkt_tol: f64,
    pub max_passes: usize,
}

struct Solver<'a> {
    k: &'a [f64],
    n: usize,
    y: &'a [f64],
    c: f64,
    alpha: Vec<f64>,
    /// `f(x_i) - y_i`, including the bias.
    err: Vec<f64>,
    bias: f64,
}

impl Solver<'_> {
    fn kij(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }

    fn violates_kkt(&self, i: usize, tol: f64) -> bool {
        let r = self.err[i] * self.y[i];
        (r < -tol && self.alpha[i] < self.c) || (r > tol && self.alpha[i] > 0.0)
    }

    /// Clipped new `alpha_j` for pair `(i, j)` and the dual decrease it buys.
    fn pair_step(&self, i: usize, j: usize) -> Option<(f64, f64)> {
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let (lo, hi) = if self.y[i] != self.y[j] {
            ((aj - ai).max(0.0), (self.c + aj - ai).min(self.c))
        } else {
            ((ai + aj - self.c).max(0.0), (ai + aj).min(self.c))
        };
        if hi - lo < 1e-12 {
            return None;
        }
        let eta = (self.kij(i, i) + self.kij(j, j) - 2.0 * self.kij(i, j)).max(TAU);
        let unclipped = self.y[j] * (self.err[i] - self.err[j]) / eta;
        let aj_new = (aj + unclipped).clamp(lo, hi);
        let delta = aj_new - aj;
        let gain = eta * delta * (unclipped - 0.5 * delta);
        if gain > 0.0 {
            Some((aj_new, gain))
        } else {
            None
        }
    }

    fn examine(&mut self, i: usize, order: &[usize], tol: f64) -> bool {
        if !self.violates_kkt(i, tol) {
            return false;
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for &j in order {
            if j == i {
                continue;
            }
            if let Some((aj_new, gain)) = self.pair_step(i, j) {
                if best.is_none_or(|(_, _, g)| gain > g) {
                    best = Some((j, aj_new, gain));
                }
            }
        }
        let Some((j, aj_new, _)) = best else {
            return false;
        };
        let aj = self.alpha[j];
        if (aj_new - aj).abs() < STEP_EPS * (aj_new + aj + STEP_EPS) {
            return false;
        }
        self.apply(i, j, aj_new);
        true
    }

    fn apply(&mut self, i: usize, j: usize, aj_new: f64) {
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let s = self.y[i] * self.y[j];
        let ai_new = (ai + s * (aj - aj_new)).clamp(0.0, self.c);
        let (dai, daj) = (ai_new - ai, aj_new - aj);

        let b1 = self.bias
            - self.err[i]
            - self.y[i] * dai * self.kij(i, i)
            - self.y[j] * daj * self.kij(i, j);
        let b2 = self.bias
            - self.err[j]
            - self.y[i] * dai * self.kij(i, j)
            - self.y[j] * daj * self.kij(j, j);
        let new_bias = if ai_new > 0.0 && ai_new < self.c {
            b1
        } else if aj_new > 0.0 && aj_new < self.c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = new_bias - self.bias;

        let (ci, cj) = (self.y[i] * dai, self.y[j] * daj);
        for t in 0..self.n {
            self.err[t] += ci * self.kij(i, t) + cj * self.kij(j, t) + db;
        }
        self.alpha[i] = ai_new;
        self.alpha[j] = aj_new;
        self.bias = new_bias;
    }

    /// Bias re-estimated from free support vectors, averaged in index order.
    fn settle_bias(&mut self) {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..self.n {
            if self.alpha[i] > 0.0 && self.alpha[i] < self.c {
                // y_i - sum_j alpha_j y_j K_ij = y_i - (err_i + y_i - bias)
                sum += self.bias - self.err[i];
                count += 1;
            }
        }
        if count > 0 {
            self.bias = sum / count as f64;
        }
    }
}

/// Solves one binary problem; `y` entries are `+1.0` or `-1.0`.
pub(crate) fn solve(k: &[f64], y: &[f64], params: &SmoParams, rng: &mut ChaCha8Rng) -> BinarySolution {
    let n = y.len();
    debug_assert_eq!(k.len(), n * n);
    let mut solver = Solver {
        k,
        n,
        y,
        c: params.c,
        alpha: vec![0.0; n],
        err: y.iter().map(|yi| -yi).collect(),
        bias: 0.0,
    };

    let mut order: Vec<usize> = (0..n).collect();
    let mut quiet_passes = 0;
    let mut sweeps = 0;
    while quiet_passes < params.max_passes && sweeps < MAX_SWEEPS {
        order.shuffle(rng);
        let mut changed = 0;
        for idx in 0..n {
            let i = order[idx];
            if solver.examine(i, &order, params.kkt_tol) {
                changed += 1;
            }
        }
        quiet_passes = if changed == 0 { quiet_passes + 1 } else { 0 };
        sweeps += 1;
    }
    solver.settle_bias();
    BinarySolution {
        alpha: solver.alpha,
        bias: solver.bias,
    }
}
