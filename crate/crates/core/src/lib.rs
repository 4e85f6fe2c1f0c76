//! Gesture-recognition training environment for 8-channel surface EMG.
//!
//! The crate covers the whole loop from raw samples to scored sessions:
//!
//! - [`signal`]: RMS and median-frequency features over sliding windows
//! - [`classifier`]: one-vs-one SVM encoder, softmax head, EMA smoothing,
//!   feedback modification and thresholded decisions
//! - [`metrics`]: accuracy, confusion, RBF class-similarity matrices and
//!   baseline-relative changes
//! - [`session`]: the four-block protocol, minigames and the trial log
//! - [`sources`]: synthetic subjects, recordings, socket ingest, noise
//! - [`gateway`]: wire protocol, live server, persistence and the CLI

pub mod classifier;
pub mod gateway;
pub mod gesture;
pub mod metrics;
pub mod session;
pub mod signal;
pub mod sources;

pub use gesture::Gesture;
