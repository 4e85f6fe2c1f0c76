use serde::{Deserialize, Serialize};

use super::ClassifierError;

const SIMPLEX_TOL: f64 = 1e-9;

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self, ClassifierError> {
        if p.is_empty() {
            return Err(ClassifierError::InvalidProbability("empty".into()));
        }
        if let Some((i, v)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(ClassifierError::InvalidProbability(format!(
                "entry {i} = {v}"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(ClassifierError::InvalidProbability(format!(
                "sums to {sum}"
            )));
        }
        Ok(ProbabilityVector(p))
    }

    /// Normalizes non-negative weights onto the simplex.
    pub fn from_weights(w: Vec<f64>) -> Result<Self, ClassifierError> {
        let sum: f64 = w.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(ClassifierError::InvalidProbability(format!(
                "weights sum to {sum}"
            )));
        }
        Self::new(w.into_iter().map(|v| v / sum).collect())
    }

    pub fn uniform(k: usize) -> Self {
        ProbabilityVector(vec![1.0 / k as f64; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Index of the largest entry (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.0.iter().enumerate() {
            if v > self.0[best] {
                best = i;
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.0[self.argmax()]
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .0
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    pub(crate) fn from_raw_unchecked(p: Vec<f64>) -> Self {
        ProbabilityVector(p)
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = ClassifierError;

    fn try_from(value: Vec<f64>) -> Result<Self, Self::Error> {
        ProbabilityVector::new(value)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for ProbabilityVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Numerically stable softmax.
pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
