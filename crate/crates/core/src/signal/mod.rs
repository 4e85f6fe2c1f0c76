//! Raw multichannel windows to RMS / median-frequency feature vectors.

mod framing;
mod spectrum;

pub use framing::{frame_count, sliding_frames, FrameAccumulator};
pub use spectrum::{median_frequency, periodogram, rms};

use serde::{Deserialize, Serialize};

/// Sensor sampling rate.
pub const SAMPLE_RATE_HZ: f64 = 1926.0;
/// Electrode count around the forearm.
pub const CHANNELS: usize = 8;
/// Length of the feature-extraction window.
pub const WINDOW_SECONDS: f64 = 0.5;
/// Live-mode step between successive windows (one sensor packet).
pub const STEP_SECONDS: f64 = 0.0135;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("empty input")]
    EmptyInput,
    #[error("signal too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("degenerate spectrum")]
    DegenerateSpectrum,
    #[error("invalid sample rate {0}")]
    InvalidSampleRate(f64),
    #[error("channel {channel}: {source}")]
    Channel {
        channel: usize,
        #[source]
        source: Box<SignalError>,
    },
    #[error("ragged window: channel {channel} has {len} samples, expected {expected}")]
    Ragged {
        channel: usize,
        len: usize,
        expected: usize,
    },
    #[error("invalid step: {0}")]
    InvalidStep(String),
}

/// Number of samples covering `seconds` at `sample_rate`.
pub fn samples_for(seconds: f64, sample_rate: f64) -> usize {
    (seconds * sample_rate).round() as usize
}

/// A fixed-duration block of multichannel signal, stored channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleWindow {
    samples: Vec<Vec<f64>>,
    sample_rate: f64,
}

impl SampleWindow {
    pub fn new(samples: Vec<Vec<f64>>, sample_rate: f64) -> Result<Self, SignalError> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(SignalError::InvalidSampleRate(sample_rate));
        }
        if samples.is_empty() {
            return Err(SignalError::EmptyInput);
        }
        let expected = samples[0].len();
        if let Some((channel, ch)) = samples
            .iter()
            .enumerate()
            .find(|(_, c)| c.len() != expected)
        {
            return Err(SignalError::Ragged {
                channel,
                len: ch.len(),
                expected,
            });
        }
        Ok(SampleWindow {
            samples,
            sample_rate,
        })
    }

    pub fn channel_count(&self) -> usize {
        self.samples.len()
    }

    pub fn len(&self) -> usize {
        self.samples[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.samples[index]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.samples
    }
}

/// Stacked per-channel features: `[rms(ch1..chK), med_freq(ch1..chK)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn from_parts(rms: &[f64], med_freq: &[f64]) -> Self {
        assert_eq!(
            rms.len(),
            med_freq.len(),
            "rms / median frequency length mismatch"
        );
        let mut values = Vec::with_capacity(rms.len() * 2);
        values.extend_from_slice(rms);
        values.extend_from_slice(med_freq);
        FeatureVector(values)
    }

    /// Wraps an already-stacked vector (any dimension, used for metric fixtures).
    pub fn from_values(values: Vec<f64>) -> Self {
        FeatureVector(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Splits back into `(rms, med_freq)`.
    pub fn split(&self) -> (&[f64], &[f64]) {
        self.0.split_at(self.0.len() / 2)
    }

    pub fn rms(&self) -> &[f64] {
        self.split().0
    }

    pub fn med_freq(&self) -> &[f64] {
        self.split().1
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// RMS and median frequency for every channel of `window`.
pub fn extract_features(window: &SampleWindow) -> Result<FeatureVector, SignalError> {
    let k = window.channel_count();
    let mut rms_values = Vec::with_capacity(k);
    let mut med_values = Vec::with_capacity(k);
    for (channel, samples) in window.channels().iter().enumerate() {
        let wrap = |source| SignalError::Channel {
            channel,
            source: Box::new(source),
        };
        rms_values.push(rms(samples).map_err(wrap)?);
        med_values.push(median_frequency(samples, window.sample_rate()).map_err(wrap)?);
    }
    Ok(FeatureVector::from_parts(&rms_values, &med_values))
}
