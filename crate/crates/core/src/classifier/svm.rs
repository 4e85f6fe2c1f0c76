//! Linear soft-margin SVM for a single class pair.
//!
//! Solves `min C·Σηᵢ + ½‖w‖²` subject to `yᵢ(w·xᵢ − b) + ηᵢ ≥ 1, ηᵢ ≥ 0`
//! through its dual with sequential minimal optimization (maximal violating
//! pair selection). The offset is then fixed by exact one-dimensional
//! minimization of the hinge term, so the returned `(w, b)` is primal optimal
//! for the converged `w` even when no support vector is free.

use serde::{Deserialize, Serialize};

use super::ClassifierError;
use crate::gesture::{class_pairs, NUM_PAIRS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-10,
            max_iterations: 200_000,
        }
    }
}

/// A trained one-vs-one SVM. `pair.0` maps to `y = +1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvoSvm {
    pub pair: (usize, usize),
    pub w: Vec<f64>,
    pub b: f64,
    pub c: f64,
}

impl OvoSvm {
    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) - self.b
    }

    /// Score in `(0, 1)`: probability-like weight of the first class.
    pub fn score(&self, x: &[f64]) -> f64 {
        logistic(self.margin(x))
    }

    /// Primal objective with slacks set to their optimal values.
    pub fn objective(&self, xs: &[&[f64]], ys: &[f64]) -> f64 {
        primal_objective(&self.w, self.b, self.c, xs, ys)
    }
}

/// Solver output with diagnostics.
#[derive(Debug, Clone)]
pub struct SvmSolution {
    pub svm: OvoSvm,
    pub alpha: Vec<f64>,
    pub slack: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
}

pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn primal_objective(w: &[f64], b: f64, c: f64, xs: &[&[f64]], ys: &[f64]) -> f64 {
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| (1.0 - y * (dot(w, x) - b)).max(0.0))
        .sum();
    c * hinge + 0.5 * dot(w, w)
}

/// Trains the SVM for `pair` on the samples labelled `pair.0` (+1) and `pair.1` (−1).
///
/// Samples of any other class are ignored.
pub fn train_ovo(
    features: &[&[f64]],
    labels: &[usize],
    pair: (usize, usize),
    c: f64,
    config: &SolverConfig,
) -> Result<SvmSolution, ClassifierError> {
    if features.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch {
            features: features.len(),
            labels: labels.len(),
        });
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(ClassifierError::InvalidPenalty(c));
    }
    let mut xs: Vec<&[f64]> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (x, &l) in features.iter().zip(labels) {
        if l == pair.0 {
            xs.push(x);
            ys.push(1.0);
        } else if l == pair.1 {
            xs.push(x);
            ys.push(-1.0);
        }
    }
    if !ys.contains(&1.0) || !ys.contains(&-1.0) {
        return Err(ClassifierError::DegeneratePair(pair.0, pair.1));
    }
    let dim = xs[0].len();
    if let Some(x) = xs.iter().find(|x| x.len() != dim) {
        return Err(ClassifierError::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    solve(&xs, &ys, pair, c, config)
}

fn solve(
    xs: &[&[f64]],
    ys: &[f64],
    pair: (usize, usize),
    c: f64,
    config: &SolverConfig,
) -> Result<SvmSolution, ClassifierError> {
    let n = xs.len();
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| dot(xs[i], xs[j])).collect())
        .collect();
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − eᵀα with Q_ij = y_i y_j K_ij
    let mut grad = vec![-1.0; n];

    let in_up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let in_low = |a: f64, y: f64| (y < 0.0 && a < c) || (y > 0.0 && a > 0.0);

    let mut iterations = 0;
    loop {
        let mut i = usize::MAX;
        let mut m = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut big_m = f64::INFINITY;
        for t in 0..n {
            let v = -ys[t] * grad[t];
            if in_up(alpha[t], ys[t]) && v > m {
                m = v;
                i = t;
            }
            if in_low(alpha[t], ys[t]) && v < big_m {
                big_m = v;
                j = t;
            }
        }
        let residual = m - big_m;
        if i == usize::MAX || j == usize::MAX || residual <= config.tolerance {
            break;
        }
        if iterations >= config.max_iterations {
            return Err(ClassifierError::NoConvergence {
                iterations,
                residual,
            });
        }
        iterations += 1;

        // move α_i += y_i t, α_j -= y_j t, preserving yᵀα
        let slope = ys[i] * grad[i] - ys[j] * grad[j];
        let curvature = gram[i][i] + gram[j][j] - 2.0 * gram[i][j];
        let bound_i = if ys[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let bound_j = if ys[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        let bound = bound_i.min(bound_j);
        let t = if curvature > 1e-12 {
            (-slope / curvature).min(bound)
        } else {
            bound
        };
        if t <= 0.0 {
            break;
        }
        alpha[i] += ys[i] * t;
        alpha[j] -= ys[j] * t;
        for a in [i, j] {
            if alpha[a] < 1e-15 * c {
                alpha[a] = 0.0;
            } else if alpha[a] > c * (1.0 - 1e-15) {
                alpha[a] = c;
            }
        }
        for k in 0..n {
            grad[k] += ys[k] * t * (gram[k][i] - gram[k][j]);
        }
    }

    let dim = xs[0].len();
    let mut w = vec![0.0; dim];
    for ((x, &y), &a) in xs.iter().zip(ys).zip(&alpha) {
        if a != 0.0 {
            for (wk, xk) in w.iter_mut().zip(x.iter()) {
                *wk += a * y * xk;
            }
        }
    }
    let b = fit_offset(&w, xs, ys, &alpha, c);
    let slack: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| (1.0 - y * (dot(&w, x) - b)).max(0.0))
        .collect();
    let objective = primal_objective(&w, b, c, xs, ys);
    let dual_objective = alpha.iter().sum::<f64>() - 0.5 * dot(&w, &w);
    Ok(SvmSolution {
        svm: OvoSvm { pair, w, b, c },
        alpha,
        slack,
        objective,
        dual_objective,
        iterations,
    })
}

/// Minimizes `Σ max(0, 1 − yᵢ(sᵢ − b))` over `b` for fixed `w`.
///
/// The minimizers form an interval between two kinks. Inside it the KKT
/// offset from free support vectors is preferred; otherwise the midpoint.
fn fit_offset(w: &[f64], xs: &[&[f64]], ys: &[f64], alpha: &[f64], c: f64) -> f64 {
    let scores: Vec<f64> = xs.iter().map(|x| dot(w, x)).collect();
    let hinge = |b: f64| -> f64 {
        scores
            .iter()
            .zip(ys)
            .map(|(&s, &y)| (1.0 - y * (s - b)).max(0.0))
            .sum()
    };
    let kinks: Vec<f64> = scores.iter().zip(ys).map(|(&s, &y)| s - y).collect();
    let values: Vec<f64> = kinks.iter().map(|&k| hinge(k)).collect();
    let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * best.abs().max(1.0);
    let (lo, hi) = kinks
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v <= best + tol)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&k, _)| {
            (lo.min(k), hi.max(k))
        });

    let free: Vec<f64> = alpha
        .iter()
        .zip(&kinks)
        .filter(|(&a, _)| a > 0.0 && a < c)
        .map(|(_, &k)| k)
        .collect();
    if free.is_empty() {
        0.5 * (lo + hi)
    } else {
        let kkt = free.iter().sum::<f64>() / free.len() as f64;
        kkt.clamp(lo, hi)
    }
}

/// Stacked pairwise scores, one per class pair in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatentVector(pub Vec<f64>);

impl LatentVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Maps a standardized feature vector through all 36 pairwise SVMs.
pub fn encode(svms: &[OvoSvm], x: &[f64]) -> Result<LatentVector, ClassifierError> {
    if svms.len() != NUM_PAIRS {
        return Err(ClassifierError::IncompleteEncoder(format!(
            "{} of {NUM_PAIRS} pair SVMs present",
            svms.len()
        )));
    }
    let mut out = Vec::with_capacity(NUM_PAIRS);
    for (svm, expected) in svms.iter().zip(class_pairs()) {
        if svm.pair != expected {
            return Err(ClassifierError::IncompleteEncoder(format!(
                "expected pair {expected:?}, found {:?}",
                svm.pair
            )));
        }
        if svm.w.len() != x.len() {
            return Err(ClassifierError::DimensionMismatch {
                expected: svm.w.len(),
                got: x.len(),
            });
        }
        out.push(svm.score(x));
    }
    Ok(LatentVector(out))
}
