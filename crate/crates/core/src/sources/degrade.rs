use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Cue, SignalSource, SourceError, SourcePacket};
use crate::classifier::ProbabilityVector;
use crate::gesture::Gesture;

/// Adds white noise at a target signal-to-noise ratio.
///
/// Signal power is tracked per channel as the running mean square of
/// everything seen so far, so the noise level settles within a few packets.
pub struct Degraded<S> {
    inner: S,
    snr_db: f64,
    rng: ChaCha8Rng,
    sum_sq: Vec<f64>,
    count: u64,
}

impl<S: SignalSource> Degraded<S> {
    pub fn new(inner: S, snr_db: f64, seed: u64) -> Self {
        let channels = inner.channels();
        Degraded {
            inner,
            snr_db,
            rng: ChaCha8Rng::seed_from_u64(seed),
            sum_sq: vec![0.0; channels],
            count: 0,
        }
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn into_inner(self) -> S {
        self.inner
    }
}

impl<S: SignalSource> SignalSource for Degraded<S> {
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
        let Some(mut p) = self.inner.next_packet()? else {
            return Ok(None);
        };
        if self.snr_db == f64::INFINITY {
            return Ok(Some(p));
        }
        self.count += p.len() as u64;
        let ratio = 10f64.powf(self.snr_db / 10.0);
        for (ch, acc) in p.samples.iter_mut().zip(self.sum_sq.iter_mut()) {
            *acc += ch.iter().map(|v| v * v).sum::<f64>();
            let sigma = (*acc / self.count as f64 / ratio).sqrt();
            for v in ch.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut self.rng);
                *v += sigma * z;
            }
        }
        Ok(Some(p))
    }

    fn cue(&mut self, cue: &Cue) {
        self.inner.cue(cue)
    }

    fn feedback(&mut self, displayed: &ProbabilityVector, target: Gesture) {
        self.inner.feedback(displayed, target)
    }
}
