use std::collections::VecDeque;

use super::{SampleWindow, SignalError};

/// Number of windows `sliding_frames` yields for a stream of `len` samples.
pub fn frame_count(len: usize, window: usize, step: usize) -> usize {
    if len < window || step == 0 {
        0
    } else {
        (len - window) / step + 1
    }
}

/// Incremental sliding-window framer for live streams.
///
/// Samples arrive in arbitrary chunks; a window is emitted each time the
/// total sample count reaches `window + k * step`.
#[derive(Debug, Clone)]
pub struct FrameAccumulator {
    window: usize,
    step: usize,
    sample_rate: f64,
    buffers: Vec<VecDeque<f64>>,
    seen: usize,
}

impl FrameAccumulator {
    pub fn new(
        channels: usize,
        window: usize,
        step: usize,
        sample_rate: f64,
    ) -> Result<Self, SignalError> {
        if step == 0 {
            return Err(SignalError::InvalidStep(
                "step must be at least one sample".into(),
            ));
        }
        if window == 0 || channels == 0 {
            return Err(SignalError::EmptyInput);
        }
        if !(sample_rate > 0.0) {
            return Err(SignalError::InvalidSampleRate(sample_rate));
        }
        Ok(FrameAccumulator {
            window,
            step,
            sample_rate,
            buffers: vec![VecDeque::with_capacity(window + 1); channels],
            seen: 0,
        })
    }

    /// Window and step given in seconds; step rounds to whole samples.
    pub fn with_seconds(
        channels: usize,
        window_s: f64,
        step_s: f64,
        sample_rate: f64,
    ) -> Result<Self, SignalError> {
        if !(step_s > 0.0) {
            return Err(SignalError::InvalidStep(format!("step_seconds = {step_s}")));
        }
        let step = super::samples_for(step_s, sample_rate).max(1);
        Self::new(
            channels,
            super::samples_for(window_s, sample_rate),
            step,
            sample_rate,
        )
    }

    pub fn window_len(&self) -> usize {
        self.window
    }

    pub fn step_len(&self) -> usize {
        self.step
    }

    pub fn reset(&mut self) {
        self.buffers.iter_mut().for_each(VecDeque::clear);
        self.seen = 0;
    }

    /// Feeds a channel-major chunk, returning every window completed by it.
    pub fn push(&mut self, chunk: &[Vec<f64>]) -> Result<Vec<SampleWindow>, SignalError> {
        if chunk.len() != self.buffers.len() {
            return Err(SignalError::Ragged {
                channel: chunk.len(),
                len: chunk.len(),
                expected: self.buffers.len(),
            });
        }
        let len = chunk[0].len();
        if let Some((channel, c)) = chunk.iter().enumerate().find(|(_, c)| c.len() != len) {
            return Err(SignalError::Ragged {
                channel,
                len: c.len(),
                expected: len,
            });
        }
        let mut out = Vec::new();
        for t in 0..len {
            for (buf, ch) in self.buffers.iter_mut().zip(chunk) {
                if buf.len() == self.window {
                    buf.pop_front();
                }
                buf.push_back(ch[t]);
            }
            self.seen += 1;
            if self.seen >= self.window && (self.seen - self.window) % self.step == 0 {
                let samples = self
                    .buffers
                    .iter()
                    .map(|b| b.iter().copied().collect())
                    .collect();
                out.push(SampleWindow::new(samples, self.sample_rate)?);
            }
        }
        Ok(out)
    }
}

/// Batch framing of a complete channel-major stream.
pub fn sliding_frames(
    stream: &[Vec<f64>],
    sample_rate: f64,
    window_seconds: f64,
    step_seconds: f64,
) -> Result<Vec<SampleWindow>, SignalError> {
    if stream.is_empty() {
        return Ok(Vec::new());
    }
    let mut acc =
        FrameAccumulator::with_seconds(stream.len(), window_seconds, step_seconds, sample_rate)?;
    acc.push(stream)
}
