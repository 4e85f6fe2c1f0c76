//! Packet ingest over a local stream socket.
//!
//! The wire format is the recording format: one header, then frames, so a
//! recording file can be streamed verbatim (`nc localhost PORT < file`).

use std::io::{BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};

use super::recording::{PacketReader, PacketWriter, RecordingHeader};
use super::{SignalSource, SourceError, SourcePacket};

pub struct SocketSource {
    reader: PacketReader<BufReader<TcpStream>>,
    header: RecordingHeader,
}

impl SocketSource {
    pub fn connect(
        addr: impl ToSocketAddrs,
        expected_rate: Option<f64>,
    ) -> Result<Self, SourceError> {
        Self::from_stream(TcpStream::connect(addr)?, expected_rate)
    }

    /// Blocks until one producer connects to `listener`.
    pub fn accept(listener: &TcpListener, expected_rate: Option<f64>) -> Result<Self, SourceError> {
        let (stream, _) = listener.accept()?;
        Self::from_stream(stream, expected_rate)
    }

    pub fn from_stream(stream: TcpStream, expected_rate: Option<f64>) -> Result<Self, SourceError> {
        stream.set_nodelay(true)?;
        let reader = PacketReader::new(BufReader::new(stream))?;
        let header = *reader.header();
        if let Some(rate) = expected_rate {
            if rate != header.sample_rate {
                return Err(SourceError::RateMismatch {
                    expected: rate,
                    found: header.sample_rate,
                });
            }
        }
        Ok(SocketSource { reader, header })
    }

    pub fn header(&self) -> &RecordingHeader {
        &self.header
    }
}

impl SignalSource for SocketSource {
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

/// Producer side: writes a header and `packets` to `stream`.
pub fn send_packets<'a>(
    stream: impl Write,
    header: RecordingHeader,
    packets: impl IntoIterator<Item = &'a SourcePacket>,
) -> Result<(), SourceError> {
    let mut w = PacketWriter::new(BufWriter::new(stream), header)?;
    for p in packets {
        w.write_packet(p)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{SyntheticProfile, SyntheticSource};

    fn header() -> RecordingHeader {
        RecordingHeader {
            channels: 8,
            packet_len: 26,
            sample_rate: 1926.0,
            start_time: 0.0,
        }
    }

    #[test]
    fn loopback_delivers_packets_in_order() {
        let mut synth = SyntheticSource::new(SyntheticProfile::default(), 2).unwrap();
        let packets: Vec<SourcePacket> = (0..40)
            .map(|_| synth.next_packet().unwrap().unwrap())
            .collect();
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let sent = packets.clone();
        let producer = std::thread::spawn(move || {
            let stream = TcpStream::connect(addr).unwrap();
            send_packets(stream, header(), &sent).unwrap();
        });
        let mut src = SocketSource::accept(&listener, Some(1926.0)).unwrap();
        let mut got = Vec::new();
        while let Some(p) = src.next_packet().unwrap() {
            got.push(p);
        }
        producer.join().unwrap();
        assert_eq!(got, packets);
    }

    #[test]
    fn gap_is_surfaced() {
        let mut synth = SyntheticSource::new(SyntheticProfile::default(), 2).unwrap();
        let mut packets: Vec<SourcePacket> = (0..4)
            .map(|_| synth.next_packet().unwrap().unwrap())
            .collect();
        packets.remove(2);
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let producer = std::thread::spawn(move || {
            send_packets(TcpStream::connect(addr).unwrap(), header(), &packets).unwrap();
        });
        let mut src = SocketSource::accept(&listener, None).unwrap();
        src.next_packet().unwrap();
        src.next_packet().unwrap();
        assert!(matches!(
            src.next_packet(),
            Err(SourceError::Gap {
                expected: 2,
                got: 3
            })
        ));
        producer.join().unwrap();
    }
}
