//! RBF kernel similarities aggregated per class pair.

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::gesture::Gesture;

/// Denominator guard for the separation ratio.
pub const SEPARATION_EPS: f64 = 1e-9;

/// Which pairs enter the median of squared distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PairSet {
    /// Unordered pairs of distinct points.
    #[default]
    Distinct,
    /// All ordered pairs of `X × X`, zero self-distances included.
    IncludeSelf,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `exp(−γ‖x − x'‖²)`.
pub fn rbf(x: &[f64], y: &[f64], gamma: f64) -> Result<f64, MetricsError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(MetricsError::InvalidGamma(gamma));
    }
    if x.len() != y.len() {
        return Err(MetricsError::DimensionMismatch(x.len(), y.len()));
    }
    Ok((-gamma * sq_dist(x, y)).exp())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Inverse median squared pairwise distance.
pub fn median_heuristic<X: AsRef<[f64]>>(
    points: &[X],
    pairs: PairSet,
) -> Result<f64, MetricsError> {
    if points.len() < 2 {
        return Err(MetricsError::TooFewPoints(points.len()));
    }
    let n = points.len();
    let mut d = Vec::with_capacity(n * n);
    for i in 0..n {
        let start = match pairs {
            PairSet::Distinct => i + 1,
            PairSet::IncludeSelf => 0,
        };
        for j in start..n {
            let a = points[i].as_ref();
            let b = points[j].as_ref();
            if a.len() != b.len() {
                return Err(MetricsError::DimensionMismatch(a.len(), b.len()));
            }
            d.push(sq_dist(a, b));
        }
    }
    let med = median(&mut d);
    if !(med > 0.0) {
        return Err(MetricsError::ZeroMedianDistance);
    }
    Ok(1.0 / med)
}

/// Mean RBF similarity between every pair of classes present in the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    /// Classes with at least one sample, canonical order; rows follow it.
    pub classes: Vec<Gesture>,
    pub values: Vec<Vec<f64>>,
    pub gamma: f64,
    pub normalized: bool,
    /// Set when min-max normalization met a constant matrix.
    pub degenerate: bool,
}

impl SimilarityMatrix {
    pub fn size(&self) -> usize {
        self.classes.len()
    }

    fn position(&self, g: Gesture) -> Option<usize> {
        self.classes.iter().position(|&c| c == g)
    }

    pub fn get(&self, a: Gesture, b: Gesture) -> Option<f64> {
        Some(self.values[self.position(a)?][self.position(b)?])
    }

    /// Canonical classes with no samples.
    pub fn absent(&self) -> Vec<Gesture> {
        Gesture::ALL
            .iter()
            .copied()
            .filter(|g| !self.classes.contains(g))
            .collect()
    }

    /// Restricts to `classes` (must all be present), keeping the flags.
    pub fn restrict(&self, classes: &[Gesture]) -> Option<SimilarityMatrix> {
        let idx: Vec<usize> = classes
            .iter()
            .map(|&g| self.position(g))
            .collect::<Option<_>>()?;
        Some(SimilarityMatrix {
            classes: classes.to_vec(),
            values: idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.values[i][j]).collect())
                .collect(),
            ..self.clone()
        })
    }

    /// Min-max rescaling to `[0, 1]` over the lower triangle (diagonal
    /// included). A constant matrix maps to all ones and is flagged.
    pub fn normalize(&self) -> SimilarityMatrix {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..=i {
                lo = lo.min(self.values[i][j]);
                hi = hi.max(self.values[i][j]);
            }
        }
        let degenerate = !(hi > lo);
        let values = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if degenerate {
                            1.0
                        } else {
                            (self.values[i][j] - lo) / (hi - lo)
                        }
                    })
                    .collect()
            })
            .collect();
        SimilarityMatrix {
            classes: self.classes.clone(),
            values,
            gamma: self.gamma,
            normalized: true,
            degenerate,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("class");
        for g in &self.classes {
            out.push(',');
            out.push_str(g.name());
        }
        out.push('\n');
        for (g, row) in self.classes.iter().zip(&self.values) {
            out.push_str(g.name());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Raw (unnormalized) class similarity matrix.
pub fn class_similarity_raw<X: AsRef<[f64]>>(
    points: &[X],
    labels: &[Gesture],
    gamma: f64,
) -> Result<SimilarityMatrix, MetricsError> {
    if points.len() != labels.len() {
        return Err(MetricsError::LengthMismatch(points.len(), labels.len()));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(MetricsError::InvalidGamma(gamma));
    }
    let classes: Vec<Gesture> = Gesture::ALL
        .iter()
        .copied()
        .filter(|g| labels.contains(g))
        .collect();
    let members: Vec<Vec<&[f64]>> = classes
        .iter()
        .map(|&c| {
            points
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == c)
                .map(|(p, _)| p.as_ref())
                .collect()
        })
        .collect();
    let n = classes.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = 0.0;
            for a in &members[i] {
                for b in &members[j] {
                    sum += rbf(a, b, gamma)?;
                }
            }
            let mean = sum / (members[i].len() * members[j].len()) as f64;
            values[i][j] = mean;
            values[j][i] = mean;
        }
    }
    Ok(SimilarityMatrix {
        classes,
        values,
        gamma,
        normalized: false,
        degenerate: false,
    })
}

/// Normalized class similarity matrix.
pub fn class_similarity<X: AsRef<[f64]>>(
    points: &[X],
    labels: &[Gesture],
    gamma: f64,
) -> Result<SimilarityMatrix, MetricsError> {
    Ok(class_similarity_raw(points, labels, gamma)?.normalize())
}

/// Mean within-class over mean between-class similarity.
pub fn separation(d: &SimilarityMatrix) -> Result<f64, MetricsError> {
    let n = d.size();
    if n < 2 {
        return Err(MetricsError::TooFewClasses(n));
    }
    let within = (0..n).map(|i| d.values[i][i]).sum::<f64>() / n as f64;
    let mut between = 0.0;
    for i in 1..n {
        for j in 0..i {
            between += d.values[i][j];
        }
    }
    between *= 2.0 / (n * (n - 1)) as f64;
    Ok(within / between.max(SEPARATION_EPS))
}
