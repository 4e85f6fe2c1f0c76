use serde::{Deserialize, Serialize};

use super::similarity::{
    class_similarity_raw, median_heuristic, separation, PairSet, SimilarityMatrix,
};
use super::{accuracy, MetricsError};
use crate::classifier::{decide, train_full, ModelConfig, DEFAULT_THRESHOLD};
use crate::gesture::Gesture;
use crate::session::TrialRecord;
use crate::signal::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineOptions {
    /// Configuration for the calibration-only model.
    pub model: ModelConfig,
    pub threshold: f64,
    pub pairs: PairSet,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        BaselineOptions {
            model: ModelConfig::default(),
            threshold: DEFAULT_THRESHOLD,
            pairs: PairSet::default(),
        }
    }
}

/// Free-game measures relative to the pre-training baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineDelta {
    /// Calibration-only model tested on the instructed games.
    pub acc_baseline: f64,
    pub acc_free: f64,
    pub d_acc: f64,
    /// Length scale from every trial of the three blocks.
    pub gamma: f64,
    /// Classes present in both the baseline and the free games.
    pub classes: Vec<Gesture>,
    pub d_baseline: SimilarityMatrix,
    pub d_free: SimilarityMatrix,
    pub d_d: Vec<Vec<f64>>,
    pub dsep_baseline: f64,
    pub dsep_free: f64,
    pub d_dsep: f64,
}

fn usable(records: &[TrialRecord]) -> Vec<&TrialRecord> {
    records
        .iter()
        .filter(|r| !r.aborted && r.features.is_some())
        .collect()
}

fn split(records: &[&TrialRecord]) -> (Vec<FeatureVector>, Vec<Gesture>) {
    records
        .iter()
        .map(|r| (r.features.clone().expect("filtered"), r.intended))
        .unzip()
}

pub fn baseline_and_delta(
    block1: &[TrialRecord],
    block2: &[TrialRecord],
    block4: &[TrialRecord],
    options: &BaselineOptions,
) -> Result<BaselineDelta, MetricsError> {
    let b1 = usable(block1);
    let b2 = usable(block2);
    let b4 = usable(block4);
    for (block, set) in [(1u8, &b1), (2, &b2), (4, &b4)] {
        if set.is_empty() {
            return Err(MetricsError::MissingBlock(block));
        }
    }

    let (f1, y1) = split(&b1);
    let (f2, y2) = split(&b2);
    let (f4, y4) = split(&b4);

    let model = train_full(&f1, &y1, &options.model)?;
    let mut tested: Vec<TrialRecord> = Vec::with_capacity(b2.len());
    for r in &b2 {
        let p = model.predict(r.features.as_ref().expect("filtered"))?;
        let mut t = (*r).clone();
        t.decision = Some(decide(&p, options.threshold)?);
        t.probabilities = Some(p);
        tested.push(t);
    }
    let acc_baseline = accuracy(&tested)?;
    let acc_free = accuracy(block4)?;

    let pooled: Vec<&[f64]> = f1
        .iter()
        .chain(&f2)
        .chain(&f4)
        .map(FeatureVector::as_slice)
        .collect();
    let gamma = median_heuristic(&pooled, options.pairs)?;

    let base_x: Vec<&[f64]> = f1.iter().chain(&f2).map(FeatureVector::as_slice).collect();
    let base_y: Vec<Gesture> = y1.iter().chain(&y2).copied().collect();
    let free_x: Vec<&[f64]> = f4.iter().map(FeatureVector::as_slice).collect();
    let raw_base = class_similarity_raw(&base_x, &base_y, gamma)?;
    let raw_free = class_similarity_raw(&free_x, &y4, gamma)?;
    let classes: Vec<Gesture> = raw_base
        .classes
        .iter()
        .copied()
        .filter(|g| raw_free.classes.contains(g))
        .collect();
    let d_baseline = raw_base
        .restrict(&classes)
        .expect("common classes")
        .normalize();
    let d_free = raw_free
        .restrict(&classes)
        .expect("common classes")
        .normalize();
    let dsep_baseline = separation(&d_baseline)?;
    let dsep_free = separation(&d_free)?;
    let d_d = d_free
        .values
        .iter()
        .zip(&d_baseline.values)
        .map(|(f, b)| f.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();

    Ok(BaselineDelta {
        acc_baseline,
        acc_free,
        d_acc: acc_free - acc_baseline,
        gamma,
        classes,
        d_baseline,
        d_free,
        d_d,
        dsep_baseline,
        dsep_free,
        d_dsep: dsep_free - dsep_baseline,
    })
}
