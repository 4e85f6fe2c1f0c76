//! Session scoring: accuracy, confusion, class-similarity structure and
//! baseline-relative changes.

mod baseline;
mod report;
mod scores;
mod similarity;

pub use baseline::{baseline_and_delta, BaselineDelta, BaselineOptions};
pub use report::{analyze, AnalysisReport, BlockSummary};
pub use scores::{accuracy, confusion, ConfusionMatrix};
pub use similarity::{
    class_similarity, class_similarity_raw, median_heuristic, rbf, separation, PairSet,
    SimilarityMatrix, SEPARATION_EPS,
};

use crate::classifier::ClassifierError;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("zero median distance: all points identical")]
    ZeroMedianDistance,
    #[error("{0} points but {1} labels")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("no scored trials")]
    Empty,
    #[error("block {0} has no usable trials")]
    MissingBlock(u8),
    #[error("session log has no configuration entry")]
    MissingConfig,
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}
