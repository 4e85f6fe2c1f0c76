use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ClassifierError, ProbabilityVector};
use crate::gesture::{Gesture, NUM_CLASSES};

pub const DEFAULT_LAMBDA: f64 = 0.9;
pub const DEFAULT_M: f64 = 0.75;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// `λ·prev + (1 − λ)·raw`.
pub fn ema_smooth(
    prev: &ProbabilityVector,
    raw: &ProbabilityVector,
    lambda: f64,
) -> Result<ProbabilityVector, ClassifierError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(ClassifierError::InvalidLambda(lambda));
    }
    if prev.len() != raw.len() {
        return Err(ClassifierError::DimensionMismatch {
            expected: prev.len(),
            got: raw.len(),
        });
    }
    let mixed = prev
        .as_slice()
        .iter()
        .zip(raw.as_slice())
        .map(|(p, r)| lambda * p + (1.0 - lambda) * r)
        .collect();
    Ok(ProbabilityVector::from_raw_unchecked(mixed))
}

/// Per-stream smoothing state, starting from the uniform distribution.
#[derive(Debug, Clone)]
pub struct EmaSmoother {
    lambda: f64,
    state: ProbabilityVector,
}

impl EmaSmoother {
    pub fn new(classes: usize, lambda: f64) -> Result<Self, ClassifierError> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(ClassifierError::InvalidLambda(lambda));
        }
        Ok(EmaSmoother {
            lambda,
            state: ProbabilityVector::uniform(classes),
        })
    }

    pub fn update(
        &mut self,
        raw: &ProbabilityVector,
    ) -> Result<&ProbabilityVector, ClassifierError> {
        self.state = ema_smooth(&self.state, raw, self.lambda)?;
        Ok(&self.state)
    }

    pub fn current(&self) -> &ProbabilityVector {
        &self.state
    }

    pub fn reset(&mut self) {
        self.state = ProbabilityVector::uniform(self.state.len());
    }
}

/// Flattens (`m < 1`) or sharpens (`m > 1`) a distribution: `pᵢᵐ / Σ p_cᵐ`.
pub fn modify(p: &[f64], m: f64) -> Result<ProbabilityVector, ClassifierError> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(ClassifierError::InvalidExponent(m));
    }
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(ClassifierError::InvalidProbability(format!(
            "entry {i} = {v}"
        )));
    }
    let top = p.iter().fold(0.0f64, |a, &v| a.max(v));
    if !(top > 0.0) {
        return Err(ClassifierError::InvalidProbability(
            "all entries zero".into(),
        ));
    }
    // scaling by the maximum first keeps the uniform vector exactly uniform
    let powered: Vec<f64> = p.iter().map(|v| (v / top).powf(m)).collect();
    let sum: f64 = powered.iter().sum();
    if !(sum > 0.0) {
        return Err(ClassifierError::InvalidProbability(
            "all entries zero".into(),
        ));
    }
    Ok(ProbabilityVector::from_raw_unchecked(
        powered.into_iter().map(|v| v / sum).collect(),
    ))
}

/// Result of thresholding a probability vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Label(Gesture),
    NoClass,
}

impl Outcome {
    pub fn gesture(self) -> Option<Gesture> {
        match self {
            Outcome::Label(g) => Some(g),
            Outcome::NoClass => None,
        }
    }

    /// Column in a 10-wide confusion matrix (`NoClass` last).
    pub fn column(self) -> usize {
        match self {
            Outcome::Label(g) => g.index(),
            Outcome::NoClass => NUM_CLASSES,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Label(g) => g.fmt(f),
            Outcome::NoClass => f.write_str("NoClass"),
        }
    }
}

impl FromStr for Outcome {
    type Err = crate::gesture::UnknownGesture;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("noclass") {
            Ok(Outcome::NoClass)
        } else {
            s.parse().map(Outcome::Label)
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub outcome: Outcome,
    pub threshold: f64,
}

/// Arg-max label when its probability is strictly above `threshold`.
pub fn decide(p: &ProbabilityVector, threshold: f64) -> Result<Decision, ClassifierError> {
    if p.len() != NUM_CLASSES {
        return Err(ClassifierError::DimensionMismatch {
            expected: NUM_CLASSES,
            got: p.len(),
        });
    }
    let k = p.argmax();
    let outcome = if p.get(k) > threshold {
        Outcome::Label(Gesture::ALL[k])
    } else {
        Outcome::NoClass
    };
    Ok(Decision { outcome, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: Vec<f64>) -> ProbabilityVector {
        ProbabilityVector::new(v).unwrap()
    }

    #[test]
    fn ema_examples() {
        let p = pv(vec![0.2, 0.3, 0.5]);
        assert_eq!(ema_smooth(&p, &p, 0.9).unwrap().as_slice(), p.as_slice());

        let uniform = ProbabilityVector::uniform(9);
        let mut one_hot = vec![0.0; 9];
        one_hot[4] = 1.0;
        let out = ema_smooth(&uniform, &pv(one_hot), 0.9).unwrap();
        for (k, &v) in out.as_slice().iter().enumerate() {
            let expected = if k == 4 { 0.2 } else { 0.1 };
            assert!((v - expected).abs() < 1e-12);
        }
        assert!(matches!(
            ema_smooth(&p, &p, 1.0),
            Err(ClassifierError::InvalidLambda(_))
        ));
        assert!(matches!(
            ema_smooth(&p, &p, -0.1),
            Err(ClassifierError::InvalidLambda(_))
        ));
    }

    #[test]
    fn ema_contracts_geometrically() {
        let raw = pv(vec![0.7, 0.2, 0.1]);
        let mut s = EmaSmoother::new(3, 0.9).unwrap();
        let start = s.current().clone();
        let dist = |a: &ProbabilityVector| {
            a.as_slice()
                .iter()
                .zip(raw.as_slice())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        let d0 = dist(&start);
        for t in 1..=50 {
            let cur = s.update(&raw).unwrap().clone();
            assert!(dist(&cur) <= 0.9f64.powi(t) * d0 + 1e-15);
        }
    }

    #[test]
    fn modify_examples() {
        let u = ProbabilityVector::uniform(9);
        for m in [0.3, 0.75, 2.0] {
            let out = modify(u.as_slice(), m).unwrap();
            assert!(out
                .as_slice()
                .iter()
                .all(|&v| (v - 1.0 / 9.0).abs() < 1e-15));
        }
        let p = [0.1, 0.6, 0.3];
        let same = modify(&p, 1.0).unwrap();
        for (a, b) in same.as_slice().iter().zip(&p) {
            assert!((a - b).abs() < 1e-15);
        }
        let two = modify(&[0.8, 0.2], 0.75).unwrap();
        assert!((two.get(0) - 0.7388).abs() < 1e-3);
        assert!((two.get(1) - 0.2612).abs() < 1e-3);
        assert!(modify(&[1.2, -0.2], 0.75).is_err());
        assert!(modify(&[0.5, 0.5], 0.0).is_err());
    }

    #[test]
    fn decide_examples() {
        let mut p = vec![0.05; 9];
        p[0] = 0.6;
        assert_eq!(
            decide(&pv(p), 0.5).unwrap().outcome,
            Outcome::Label(Gesture::Up)
        );
        assert_eq!(
            decide(&ProbabilityVector::uniform(9), 0.5).unwrap().outcome,
            Outcome::NoClass
        );
        let mut p = vec![0.0625; 9];
        p[3] = 0.5;
        assert_eq!(decide(&pv(p), 0.5).unwrap().outcome, Outcome::NoClass);
    }

    #[test]
    fn outcome_serializes_as_name() {
        assert_eq!(
            serde_json::to_string(&Outcome::NoClass).unwrap(),
            "\"NoClass\""
        );
        assert_eq!(
            serde_json::from_str::<Outcome>("\"Fist\"").unwrap(),
            Outcome::Label(Gesture::Fist)
        );
    }
}
