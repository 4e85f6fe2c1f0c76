//! Two-stage gesture classifier and its streaming post-processing.
//!
//! Features are z-scored, encoded by 36 one-vs-one linear SVMs into a latent
//! vector of pairwise scores, and mapped to class probabilities by a softmax
//! head trained with AdamW. Live output is smoothed with an exponential moving
//! average, optionally flattened by a probability exponent, and thresholded.

mod feedback;
mod head;
mod model;
mod probability;
mod svm;

pub use feedback::{
    decide, ema_smooth, modify, Decision, EmaSmoother, Outcome, DEFAULT_LAMBDA, DEFAULT_M,
    DEFAULT_THRESHOLD,
};
pub use head::{train_head, AdamW, HeadConfig, HeadGradient, HeadTraining, SoftmaxHead};
pub use model::{
    train_full, GestureModel, ModelConfig, Standardizer, TrainingMetadata, MODEL_FORMAT,
};
pub use probability::ProbabilityVector;
pub use svm::{encode, logistic, train_ovo, LatentVector, OvoSvm, SolverConfig, SvmSolution};

use crate::gesture::Gesture;

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("degenerate pair ({0}, {1}): both classes need at least one sample")]
    DegeneratePair(usize, usize),
    #[error(
        "SVM solver did not converge after {iterations} iterations (KKT residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("incomplete encoder: {0}")]
    IncompleteEncoder(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("diverged: non-finite loss at epoch {0}")]
    Diverged(usize),
    #[error("missing classes: {}", .0.iter().map(|g| g.name()).collect::<Vec<_>>().join(", "))]
    MissingClasses(Vec<Gesture>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("features and labels differ in length ({features} vs {labels})")]
    LengthMismatch { features: usize, labels: usize },
    #[error("smoothing factor must lie in [0, 1), got {0}")]
    InvalidLambda(f64),
    #[error("modification exponent must be positive, got {0}")]
    InvalidExponent(f64),
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
    #[error("invalid penalty C = {0}")]
    InvalidPenalty(f64),
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
