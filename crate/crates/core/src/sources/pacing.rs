use std::time::{Duration, Instant};

use super::{Cue, SignalSource, SourceError, SourcePacket};
use crate::classifier::ProbabilityVector;
use crate::gesture::Gesture;

/// Emits packets no faster than `speed` × real time; `speed = 0` disables
/// pacing entirely.
pub struct Paced<S> {
    inner: S,
    speed: f64,
    start: Option<Instant>,
    samples: u64,
}

impl<S: SignalSource> Paced<S> {
    pub fn new(inner: S, speed: f64) -> Self {
        Paced {
            inner,
            speed: speed.max(0.0),
            start: None,
            samples: 0,
        }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut S {
        &mut self.inner
    }

    pub fn into_inner(self) -> S {
        self.inner
    }
}

impl<S: SignalSource> SignalSource for Paced<S> {
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
        if self.speed > 0.0 {
            let start = *self.start.get_or_insert_with(Instant::now);
            let due = Duration::from_secs_f64(
                self.samples as f64 / self.inner.sample_rate() / self.speed,
            );
            let elapsed = start.elapsed();
            if due > elapsed {
                std::thread::sleep(due - elapsed);
            }
        }
        let p = self.inner.next_packet()?;
        if let Some(p) = &p {
            self.samples += p.len() as u64;
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

    #[test]
    fn real_time_pacing_takes_wall_time() {
        let src = SyntheticSource::new(SyntheticProfile::default(), 0).unwrap();
        let mut paced = Paced::new(src, 1.0);
        let t = Instant::now();
        // 11 packets: the last is due at 10 × 26 / 1926 s ≈ 135 ms
        for _ in 0..11 {
            paced.next_packet().unwrap();
        }
        let e = t.elapsed().as_secs_f64();
        assert!(e >= 0.13 && e < 0.5, "{e}");
    }
}
