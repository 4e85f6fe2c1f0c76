//! Binary packet recordings.
//!
//! Layout (all little-endian):
//!
//! ```text
//! header, 32 bytes
//!   0   [u8; 4]  magic "MYOR"
//!   4   u16      format version (1)
//!   6   u16      channel count C
//!   8   u32      samples per packet L
//!   12  f64      sample rate, Hz
//!   20  f64      start time, seconds (informational)
//!   28  u32      reserved, zero
//! frame, 16 + 8·C·L bytes, repeated
//!   0   u64      sequence number
//!   8   f64      timestamp, seconds
//!   16  f64 × C·L samples, channel-major
//! ```

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Cue, Paced, SequenceMonitor, SignalSource, SourceError, SourcePacket};
use crate::classifier::ProbabilityVector;
use crate::gesture::Gesture;

pub const MAGIC: [u8; 4] = *b"MYOR";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordingHeader {
    pub channels: u16,
    pub packet_len: u32,
    pub sample_rate: f64,
    pub start_time: f64,
}

impl RecordingHeader {
    pub fn frame_len(&self) -> usize {
        16 + 8 * self.channels as usize * self.packet_len as usize
    }

    pub fn encode(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4..6].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        out[6..8].copy_from_slice(&self.channels.to_le_bytes());
        out[8..12].copy_from_slice(&self.packet_len.to_le_bytes());
        out[12..20].copy_from_slice(&self.sample_rate.to_le_bytes());
        out[20..28].copy_from_slice(&self.start_time.to_le_bytes());
        out
    }

    pub fn decode(bytes: &[u8; HEADER_LEN]) -> Result<Self, SourceError> {
        let malformed = |offset: u64, reason: &str| SourceError::Malformed {
            offset,
            reason: reason.to_string(),
        };
        if bytes[0..4] != MAGIC {
            return Err(malformed(0, "bad magic"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(malformed(4, &format!("unsupported version {version}")));
        }
        let channels = u16::from_le_bytes([bytes[6], bytes[7]]);
        let packet_len = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let sample_rate = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
        let start_time = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
        if channels == 0 {
            return Err(malformed(6, "zero channels"));
        }
        if packet_len == 0 {
            return Err(malformed(8, "zero packet length"));
        }
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(malformed(12, "invalid sample rate"));
        }
        Ok(RecordingHeader {
            channels,
            packet_len,
            sample_rate,
            start_time,
        })
    }
}

/// Writes a header followed by frames to any byte sink.
pub struct PacketWriter<W: Write> {
    inner: W,
    header: RecordingHeader,
}

impl<W: Write> PacketWriter<W> {
    pub fn new(mut inner: W, header: RecordingHeader) -> io::Result<Self> {
        inner.write_all(&header.encode())?;
        Ok(PacketWriter { inner, header })
    }

    pub fn write_packet(&mut self, p: &SourcePacket) -> Result<(), SourceError> {
        let (c, l) = (
            self.header.channels as usize,
            self.header.packet_len as usize,
        );
        if p.channels() != c || p.samples.iter().any(|ch| ch.len() != l) {
            return Err(SourceError::Shape {
                channels: p.channels(),
                len: p.len(),
                expected_channels: c,
                expected_len: l,
            });
        }
        let mut buf = Vec::with_capacity(self.header.frame_len());
        buf.extend_from_slice(&p.sequence.to_le_bytes());
        buf.extend_from_slice(&p.timestamp.to_le_bytes());
        for ch in &p.samples {
            for v in ch {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        self.inner.write_all(&buf)?;
        Ok(())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}

/// Streaming frame decoder with sequence checking.
pub struct PacketReader<R: Read> {
    inner: R,
    header: RecordingHeader,
    offset: u64,
    monitor: SequenceMonitor,
}

/// Reads until `buf` is full; returns bytes read (short only at EOF).
fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        match r.read(&mut buf[n..]) {
            Ok(0) => break,
            Ok(k) => n += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(n)
}

impl<R: Read> PacketReader<R> {
    pub fn new(mut inner: R) -> Result<Self, SourceError> {
        let mut head = [0u8; HEADER_LEN];
        let n = read_full(&mut inner, &mut head)?;
        if n < HEADER_LEN {
            return Err(SourceError::Truncated { offset: n as u64 });
        }
        let header = RecordingHeader::decode(&head)?;
        Ok(PacketReader {
            inner,
            header,
            offset: HEADER_LEN as u64,
            monitor: SequenceMonitor::default(),
        })
    }

    pub fn header(&self) -> &RecordingHeader {
        &self.header
    }

    pub fn next_packet(&mut self) -> Result<Option<SourcePacket>, SourceError> {
        let mut buf = vec![0u8; self.header.frame_len()];
        let n = read_full(&mut self.inner, &mut buf)?;
        if n == 0 {
            return Ok(None);
        }
        if n < buf.len() {
            return Err(SourceError::Truncated {
                offset: self.offset,
            });
        }
        let frame_offset = self.offset;
        self.offset += buf.len() as u64;
        let sequence = u64::from_le_bytes(buf[0..8].try_into().unwrap());
        let timestamp = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        self.monitor.check(sequence).map_err(|e| match e {
            SourceError::NonMonotone { last, got } => SourceError::Malformed {
                offset: frame_offset,
                reason: format!("sequence {got} after {last}"),
            },
            other => other,
        })?;
        let l = self.header.packet_len as usize;
        let samples = buf[16..]
            .chunks_exact(8 * l)
            .map(|ch| {
                ch.chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                    .collect()
            })
            .collect();
        Ok(Some(SourcePacket {
            samples,
            sequence,
            timestamp,
        }))
    }
}

/// Reads a whole recording into memory.
pub fn read_recording(
    path: impl AsRef<Path>,
) -> Result<(RecordingHeader, Vec<SourcePacket>), SourceError> {
    let mut src = ReplaySource::open(path, None)?;
    let header = src.header;
    let mut packets = Vec::new();
    while let Some(p) = src.reader.next_packet()? {
        packets.push(p);
    }
    Ok((header, packets))
}

/// Re-emits a recorded packet stream.
pub struct ReplaySource {
    reader: PacketReader<BufReader<File>>,
    header: RecordingHeader,
}

impl ReplaySource {
    /// Opens and validates `path`. A trailing partial frame is rejected up
    /// front, so no packet of a truncated file is ever delivered.
    pub fn open(path: impl AsRef<Path>, expected_rate: Option<f64>) -> Result<Self, SourceError> {
        let file = File::open(path)?;
        let len = file.metadata()?.len();
        let reader = PacketReader::new(BufReader::new(file))?;
        let header = *reader.header();
        if let Some(rate) = expected_rate {
            if rate != header.sample_rate {
                return Err(SourceError::RateMismatch {
                    expected: rate,
                    found: header.sample_rate,
                });
            }
        }
        let body = len - HEADER_LEN as u64;
        let frame = header.frame_len() as u64;
        if body % frame != 0 {
            return Err(SourceError::Truncated {
                offset: HEADER_LEN as u64 + (body / frame) * frame,
            });
        }
        Ok(ReplaySource { reader, header })
    }

    pub fn header(&self) -> &RecordingHeader {
        &self.header
    }
}

impl SignalSource for ReplaySource {
    fn channels(&self) -> usize {
        self.header.channels as usize
    }

    fn sample_rate(&self) -> f64 {
        self.header.sample_rate
    }

    fn packet_len(&self) -> usize {
        self.header.packet_len as usize
    }

    fn next_packet(&mut self) -> Result<Option<SourcePacket>, SourceError> {
        self.reader.next_packet()
    }
}

/// Replays `path`; `speed = 0` emits as fast as possible, `1` in real time.
pub fn replay(
    path: impl AsRef<Path>,
    speed: f64,
    expected_rate: Option<f64>,
) -> Result<Paced<ReplaySource>, SourceError> {
    Ok(Paced::new(ReplaySource::open(path, expected_rate)?, speed))
}

/// Passes packets through while writing each one to a recording.
pub struct RecordingTee<S, W: Write> {
    inner: S,
    writer: PacketWriter<W>,
}

impl<S: SignalSource> RecordingTee<S, BufWriter<File>> {
    pub fn create(inner: S, path: impl AsRef<Path>) -> Result<Self, SourceError> {
        let file = BufWriter::new(File::create(path)?);
        Self::new(inner, file)
    }
}

impl<S: SignalSource, W: Write> RecordingTee<S, W> {
    pub fn new(inner: S, sink: W) -> Result<Self, SourceError> {
        let header = RecordingHeader {
            channels: inner.channels() as u16,
            packet_len: inner.packet_len() as u32,
            sample_rate: inner.sample_rate(),
            start_time: 0.0,
        };
        Ok(RecordingTee {
            writer: PacketWriter::new(sink, header)?,
            inner,
        })
    }

    pub fn finish(mut self) -> Result<(S, W), SourceError> {
        self.writer.flush()?;
        Ok((self.inner, self.writer.into_inner()))
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut S {
        &mut self.inner
    }
}

impl<S: SignalSource, W: Write> SignalSource for RecordingTee<S, W> {
    fn channels(&self) -> usize {
        self.inner.channels()
    }

    fn sample_rate(&self) -> f64 {
        self.inner.sample_rate()
    }

    fn packet_len(&self) -> usize {
        self.inner.packet_len()
    }

    fn next_packet(&mut self) -> Result<Option<SourcePacket>, SourceError> {
        let p = self.inner.next_packet()?;
        if let Some(p) = &p {
            self.writer.write_packet(p)?;
        }
        Ok(p)
    }

    fn cue(&mut self, cue: &Cue) {
        self.inner.cue(cue)
    }

    fn feedback(&mut self, displayed: &ProbabilityVector, target: Gesture) {
        self.inner.feedback(displayed, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{SyntheticProfile, SyntheticSource};

    fn record(packets: usize, path: &Path) -> Vec<SourcePacket> {
        let src = SyntheticSource::new(SyntheticProfile::default(), 5).unwrap();
        let mut tee = RecordingTee::create(src, path).unwrap();
        let out: Vec<SourcePacket> = (0..packets)
            .map(|_| tee.next_packet().unwrap().unwrap())
            .collect();
        tee.finish().unwrap();
        out
    }

    #[test]
    fn record_then_replay_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.myor");
        let sent = record(50, &path);
        let (header, got) = read_recording(&path).unwrap();
        assert_eq!(header.channels, 8);
        assert_eq!(header.packet_len, 26);
        assert_eq!(sent, got);
        let len = std::fs::metadata(&path).unwrap().len() as usize;
        assert_eq!(len, HEADER_LEN + 50 * header.frame_len());
    }

    #[test]
    fn truncated_file_rejected_before_emitting() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.myor");
        record(3, &path);
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 10]).unwrap();
        match ReplaySource::open(&path, None) {
            Err(SourceError::Truncated { offset }) => {
                assert_eq!(offset as usize, HEADER_LEN + 2 * (16 + 8 * 8 * 26))
            }
            other => panic!("expected truncation, got {:?}", other.err()),
        }
    }

    #[test]
    fn bad_magic_and_rate_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.myor");
        record(1, &path);
        assert!(matches!(
            ReplaySource::open(&path, Some(1000.0)),
            Err(SourceError::RateMismatch { .. })
        ));
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            ReplaySource::open(&path, None),
            Err(SourceError::Malformed { offset: 0, .. })
        ));
    }

    #[test]
    fn header_layout_is_fixed() {
        let h = RecordingHeader {
            channels: 8,
            packet_len: 26,
            sample_rate: 1926.0,
            start_time: 0.0,
        };
        let bytes = h.encode();
        assert_eq!(&bytes[0..4], b"MYOR");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(&bytes[6..8], &[8, 0]);
        assert_eq!(&bytes[8..12], &[26, 0, 0, 0]);
        assert_eq!(
            f64::from_le_bytes(bytes[12..20].try_into().unwrap()),
            1926.0
        );
        assert_eq!(RecordingHeader::decode(&bytes).unwrap(), h);
    }
}
