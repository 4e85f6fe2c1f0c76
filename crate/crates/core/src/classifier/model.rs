use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::svm::{encode, train_ovo, LatentVector, OvoSvm, SolverConfig};
use super::{train_head, ClassifierError, HeadConfig, ProbabilityVector, SoftmaxHead};
use crate::gesture::{class_pairs, Gesture, NUM_CLASSES};
use crate::signal::FeatureVector;

pub const MODEL_FORMAT: &str = "myotrain-model/v1";

/// Per-dimension z-score fitted on the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[&[f64]]) -> Result<Self, ClassifierError> {
        let first = rows.first().ok_or(ClassifierError::EmptyDataset)?;
        let dim = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            if r.len() != dim {
                return Err(ClassifierError::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v / n;
            }
        }
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        // constant dimensions pass through centred but unscaled
        let std = var
            .into_iter()
            .map(|v| if v > 0.0 { v.sqrt() } else { 1.0 })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, ClassifierError> {
        if x.len() != self.dim() {
            return Err(ClassifierError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// SVM slack penalty.
    pub svm_c: f64,
    pub solver: SolverConfig,
    pub head: HeadConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            svm_c: 1.0,
            solver: SolverConfig::default(),
            head: HeadConfig::default(),
        }
    }
}

impl ModelConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut cfg = ModelConfig::default();
        cfg.head.seed = seed;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub config: ModelConfig,
    pub samples: usize,
    pub class_counts: Vec<usize>,
    pub initial_loss: f64,
    pub final_loss: f64,
}

/// Standardizer, pairwise SVM encoder and softmax head, bundled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureModel {
    pub format: String,
    pub class_order: Vec<Gesture>,
    pub standardizer: Standardizer,
    pub svms: Vec<OvoSvm>,
    pub head: SoftmaxHead,
    pub metadata: TrainingMetadata,
}

/// Fits a model from scratch: standardizer, 36 pair SVMs, then the head on
/// the frozen encoder's latents.
pub fn train_full(
    features: &[FeatureVector],
    labels: &[Gesture],
    config: &ModelConfig,
) -> Result<GestureModel, ClassifierError> {
    if features.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    if features.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch {
            features: features.len(),
            labels: labels.len(),
        });
    }
    let mut class_counts = vec![0usize; NUM_CLASSES];
    for g in labels {
        class_counts[g.index()] += 1;
    }
    let missing: Vec<Gesture> = Gesture::ALL
        .iter()
        .copied()
        .filter(|g| class_counts[g.index()] == 0)
        .collect();
    if !missing.is_empty() {
        return Err(ClassifierError::MissingClasses(missing));
    }

    let raw: Vec<&[f64]> = features.iter().map(FeatureVector::as_slice).collect();
    let standardizer = Standardizer::fit(&raw)?;
    let z: Vec<Vec<f64>> = raw
        .iter()
        .map(|x| standardizer.apply(x))
        .collect::<Result<_, _>>()?;
    let z_refs: Vec<&[f64]> = z.iter().map(Vec::as_slice).collect();
    let y: Vec<usize> = labels.iter().map(|g| g.index()).collect();

    let svms: Vec<OvoSvm> = class_pairs()
        .into_iter()
        .map(|pair| train_ovo(&z_refs, &y, pair, config.svm_c, &config.solver).map(|s| s.svm))
        .collect::<Result<_, _>>()?;

    let latents: Vec<LatentVector> = z_refs
        .iter()
        .map(|x| encode(&svms, x))
        .collect::<Result<_, _>>()?;
    let latent_refs: Vec<&[f64]> = latents.iter().map(LatentVector::as_slice).collect();
    let trained = train_head(&latent_refs, &y, NUM_CLASSES, &config.head)?;

    Ok(GestureModel {
        format: MODEL_FORMAT.to_string(),
        class_order: Gesture::ALL.to_vec(),
        standardizer,
        svms,
        head: trained.head,
        metadata: TrainingMetadata {
            config: *config,
            samples: features.len(),
            class_counts,
            initial_loss: trained.losses[0],
            final_loss: *trained.losses.last().unwrap_or(&trained.losses[0]),
        },
    })
}

impl GestureModel {
    pub fn latent(&self, x: &FeatureVector) -> Result<LatentVector, ClassifierError> {
        let z = self.standardizer.apply(x.as_slice())?;
        encode(&self.svms, &z)
    }

    /// Class probabilities for one raw feature vector.
    pub fn predict(&self, x: &FeatureVector) -> Result<ProbabilityVector, ClassifierError> {
        let s = self.latent(x)?;
        Ok(self.head.forward(s.as_slice()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let model: GestureModel =
            serde_json::from_str(text).map_err(|e| ClassifierError::Format(e.to_string()))?;
        if model.format != MODEL_FORMAT {
            return Err(ClassifierError::Format(format!(
                "unsupported format tag `{}` (expected `{MODEL_FORMAT}`)",
                model.format
            )));
        }
        if model.class_order != Gesture::ALL {
            return Err(ClassifierError::Format(
                "class order differs from canonical order".into(),
            ));
        }
        if model.head.classes() != NUM_CLASSES || model.head.dim() != model.svms.len() {
            return Err(ClassifierError::Format(
                "head shape does not match encoder".into(),
            ));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ClassifierError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClassifierError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
