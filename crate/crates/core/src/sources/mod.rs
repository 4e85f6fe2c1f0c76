//! Signal providers delivering fixed-size multichannel packets.
//!
//! Every source emits the same framing (8 channels × 26 samples at 1926 Hz
//! by default), so the session engine cannot tell them apart by shape.

mod degrade;
mod pacing;
mod recording;
mod socket;
mod synthetic;

pub use degrade::Degraded;
pub use pacing::Paced;
pub use recording::{
    read_recording, replay, PacketReader, PacketWriter, RecordingHeader, RecordingTee,
    ReplaySource, FORMAT_VERSION, HEADER_LEN, MAGIC,
};
pub use socket::{send_packets, SocketSource};
pub use synthetic::{ClassTemplate, SyntheticProfile, SyntheticSource};

use serde::{Deserialize, Serialize};

use crate::classifier::ProbabilityVector;
use crate::gesture::Gesture;
use crate::session::Phase;

/// Samples per packet (13.5 ms at 1926 Hz).
pub const PACKET_LEN: usize = 26;

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed stream at byte {offset}: {reason}")]
    Malformed { offset: u64, reason: String },
    #[error("truncated stream: partial frame at byte {offset}")]
    Truncated { offset: u64 },
    #[error("sample-rate mismatch: expected {expected} Hz, stream has {found} Hz")]
    RateMismatch { expected: f64, found: f64 },
    #[error("sequence gap: expected packet {expected}, got {got}")]
    Gap { expected: u64, got: u64 },
    #[error("non-monotone sequence number {got} after {last}")]
    NonMonotone { last: u64, got: u64 },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("packet shape {channels}×{len} does not match {expected_channels}×{expected_len}")]
    Shape {
        channels: usize,
        len: usize,
        expected_channels: usize,
        expected_len: usize,
    },
}

/// One sensor packet, channel-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourcePacket {
    pub samples: Vec<Vec<f64>>,
    pub sequence: u64,
    pub timestamp: f64,
}

impl SourcePacket {
    pub fn channels(&self) -> usize {
        self.samples.len()
    }

    pub fn len(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// What the session is currently asking of the subject.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cue {
    pub block: u8,
    pub phase: Phase,
    /// Gesture to produce; `None` when the subject chooses freely.
    pub gesture: Option<Gesture>,
}

pub trait SignalSource {
    fn channels(&self) -> usize;

    fn sample_rate(&self) -> f64;

    fn packet_len(&self) -> usize {
        PACKET_LEN
    }

    /// Next packet, or `None` once the stream has ended.
    fn next_packet(&mut self) -> Result<Option<SourcePacket>, SourceError>;

    /// Phase-boundary notification. Scripted subjects switch gestures here.
    fn cue(&mut self, _cue: &Cue) {}

    /// The probability vector shown to the subject for `target`.
    fn feedback(&mut self, _displayed: &ProbabilityVector, _target: Gesture) {}
}

impl<S: SignalSource + ?Sized> SignalSource for Box<S> {
    fn channels(&self) -> usize {
        (**self).channels()
    }
    fn sample_rate(&self) -> f64 {
        (**self).sample_rate()
    }
    fn packet_len(&self) -> usize {
        (**self).packet_len()
    }
    fn next_packet(&mut self) -> Result<Option<SourcePacket>, SourceError> {
        (**self).next_packet()
    }
    fn cue(&mut self, cue: &Cue) {
        (**self).cue(cue)
    }
    fn feedback(&mut self, displayed: &ProbabilityVector, target: Gesture) {
        (**self).feedback(displayed, target)
    }
}

/// Rejects repeated, reordered or skipped sequence numbers.
#[derive(Debug, Clone, Default)]
pub struct SequenceMonitor {
    last: Option<u64>,
}

impl SequenceMonitor {
    pub fn check(&mut self, seq: u64) -> Result<(), SourceError> {
        if let Some(last) = self.last {
            if seq <= last {
                return Err(SourceError::NonMonotone { last, got: seq });
            }
            if seq != last + 1 {
                self.last = Some(seq);
                return Err(SourceError::Gap {
                    expected: last + 1,
                    got: seq,
                });
            }
        }
        self.last = Some(seq);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monitor_flags_gaps_and_reorders() {
        let mut m = SequenceMonitor::default();
        m.check(5).unwrap();
        m.check(6).unwrap();
        assert!(matches!(
            m.check(8),
            Err(SourceError::Gap {
                expected: 7,
                got: 8
            })
        ));
        m.check(9).unwrap();
        assert!(matches!(m.check(9), Err(SourceError::NonMonotone { .. })));
    }
}
