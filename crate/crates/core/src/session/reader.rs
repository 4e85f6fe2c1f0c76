use std::collections::VecDeque;

use super::SessionError;
use crate::sources::{Cue, SequenceMonitor, SignalSource, SourceError};

/// Sample-exact reads over a packet stream.
///
/// Packets are split at arbitrary sample boundaries; the remainder stays
/// buffered for the next read. `position` counts samples handed out, which
/// is the session clock.
pub struct SampleReader<S> {
    source: S,
    buffer: Vec<VecDeque<f64>>,
    position: u64,
    monitor: SequenceMonitor,
}

impl<S: SignalSource> SampleReader<S> {
    pub fn new(source: S) -> Self {
        let channels = source.channels();
        SampleReader {
            source,
            buffer: vec![VecDeque::new(); channels],
            position: 0,
            monitor: SequenceMonitor::default(),
        }
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn source_mut(&mut self) -> &mut S {
        &mut self.source
    }

    pub fn into_source(self) -> S {
        self.source
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn sample_rate(&self) -> f64 {
        self.source.sample_rate()
    }

    pub fn channels(&self) -> usize {
        self.buffer.len()
    }

    pub fn cue(&mut self, cue: &Cue) {
        self.source.cue(cue)
    }

    fn buffered(&self) -> usize {
        self.buffer.first().map_or(0, VecDeque::len)
    }

    /// Exactly `n` samples per channel, or `None` if the stream ends first.
    /// On underrun the partial data is discarded.
    pub fn read(&mut self, n: usize) -> Result<Option<Vec<Vec<f64>>>, SessionError> {
        while self.buffered() < n {
            let Some(p) = self.source.next_packet()? else {
                let lost = self.buffered();
                self.buffer.iter_mut().for_each(VecDeque::clear);
                self.position += lost as u64;
                return Ok(None);
            };
            self.monitor.check(p.sequence)?;
            if p.channels() != self.buffer.len() || p.samples.iter().any(|c| c.len() != p.len()) {
                return Err(SourceError::Shape {
                    channels: p.channels(),
                    len: p.len(),
                    expected_channels: self.buffer.len(),
                    expected_len: self.source.packet_len(),
                }
                .into());
            }
            for (buf, ch) in self.buffer.iter_mut().zip(p.samples) {
                buf.extend(ch);
            }
        }
        self.position += n as u64;
        Ok(Some(
            self.buffer
                .iter_mut()
                .map(|b| b.drain(..n).collect())
                .collect(),
        ))
    }
}
