//! Parametric stand-in for a human subject.
//!
//! Each channel is band-limited Gaussian noise (two cascaded band-pass
//! biquads) scaled to the active class's amplitude template, plus white floor
//! noise. Per-trial variability comes from an amplitude jitter and a partial
//! blend toward another gesture's template. Feedback shown during live
//! training sharpens the subject: the precision factor of the target gesture
//! shrinks both variability terms in proportion to the displayed error.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Cue, SignalSource, SourceError, SourcePacket, PACKET_LEN};
use crate::classifier::ProbabilityVector;
use crate::gesture::{Gesture, NUM_CLASSES};
use crate::session::Phase;
use crate::signal::{CHANNELS, SAMPLE_RATE_HZ};

/// Per-channel amplitude (target RMS) and pass band for one gesture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassTemplate {
    pub amplitude: Vec<f64>,
    pub band: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticProfile {
    pub sample_rate: f64,
    pub channels: usize,
    pub packet_len: usize,
    /// Canonical class order; every active template is interpolated from
    /// `Rest` by `separation`.
    pub classes: Vec<ClassTemplate>,
    pub noise_floor: f64,
    pub separation: f64,
    /// Per-trial, per-channel relative amplitude spread.
    pub jitter: f64,
    /// Per-trial relative spread of the pass-band edges (log scale).
    pub band_jitter: f64,
    /// Upper bound of the per-trial blend toward another active gesture.
    pub confusion: f64,
    /// Variability reduction per unit displayed error per feedback frame.
    pub learning_rate: f64,
    pub min_precision: f64,
    /// Template exaggeration gained per unit displayed error per frame.
    pub sharpening_rate: f64,
    pub max_sharpening: f64,
}

fn wrist(dominant: usize, band: (f64, f64)) -> ClassTemplate {
    let amplitude = (0..CHANNELS)
        .map(|c| {
            let d = (c as isize - dominant as isize).rem_euclid(CHANNELS as isize);
            match d {
                0 => 1.0,
                1 | 7 => 0.3,
                _ => 0.06,
            }
        })
        .collect();
    ClassTemplate {
        amplitude,
        band: vec![band; CHANNELS],
    }
}

fn grasp(amplitude: [f64; CHANNELS], band: (f64, f64)) -> ClassTemplate {
    ClassTemplate {
        amplitude: amplitude.to_vec(),
        band: vec![band; CHANNELS],
    }
}

impl Default for SyntheticProfile {
    /// Wrist gestures each dominate one electrode; the grasp gestures share
    /// broad, overlapping templates (Thumb, Pinch and Fist most alike).
    fn default() -> Self {
        let classes = vec![
            wrist(0, (30.0, 130.0)), // Up: dorsal
            grasp(
                [0.35, 0.45, 0.55, 0.45, 0.30, 0.25, 0.25, 0.30],
                (55.0, 210.0),
            ), // Thumb
            wrist(6, (80.0, 260.0)), // Right: ulnar
            grasp(
                [0.30, 0.40, 0.55, 0.50, 0.35, 0.25, 0.25, 0.25],
                (65.0, 230.0),
            ), // Pinch
            wrist(4, (50.0, 190.0)), // Down: volar
            grasp(
                [0.45, 0.45, 0.50, 0.50, 0.50, 0.45, 0.40, 0.40],
                (60.0, 220.0),
            ), // Fist
            wrist(2, (110.0, 330.0)), // Left: radial
            grasp(
                [0.60, 0.55, 0.20, 0.15, 0.15, 0.20, 0.35, 0.60],
                (35.0, 170.0),
            ), // Open
            ClassTemplate {
                amplitude: vec![0.03; CHANNELS],
                band: vec![(25.0, 140.0); CHANNELS],
            }, // Rest
        ];
        SyntheticProfile {
            sample_rate: SAMPLE_RATE_HZ,
            channels: CHANNELS,
            packet_len: PACKET_LEN,
            classes,
            noise_floor: 0.01,
            separation: 1.0,
            jitter: 0.1,
            band_jitter: 0.0,
            confusion: 0.0,
            learning_rate: 0.0,
            min_precision: 0.05,
            sharpening_rate: 0.0,
            max_sharpening: 0.5,
        }
    }
}

impl SyntheticProfile {
    /// A variable subject whose consistency improves with feedback: the
    /// profile the simulated condition comparisons are run with.
    pub fn coadaptive() -> Self {
        SyntheticProfile {
            jitter: 0.3,
            band_jitter: 0.15,
            confusion: 0.5,
            learning_rate: 0.0005,
            sharpening_rate: 0.0005,
            max_sharpening: 0.5,
            ..SyntheticProfile::default()
        }
    }

    pub fn with_separation(separation: f64) -> Self {
        SyntheticProfile {
            separation,
            ..SyntheticProfile::default()
        }
    }

    pub fn validate(&self) -> Result<(), SourceError> {
        let bad = |m: String| Err(SourceError::InvalidProfile(m));
        if !(self.sample_rate > 0.0) {
            return bad(format!("sample_rate {}", self.sample_rate));
        }
        if self.channels == 0 || self.packet_len == 0 {
            return bad("channels and packet_len must be positive".into());
        }
        if self.classes.len() != NUM_CLASSES {
            return bad(format!(
                "{} class templates, expected {NUM_CLASSES}",
                self.classes.len()
            ));
        }
        if !(self.separation >= 0.0)
            || !(self.jitter >= 0.0)
            || !(self.band_jitter >= 0.0)
            || !(self.confusion >= 0.0)
            || !(self.noise_floor >= 0.0)
        {
            return bad(
                "separation, jitter, band_jitter, confusion and noise_floor must be non-negative"
                    .into(),
            );
        }
        if !(self.learning_rate >= 0.0) || !(self.min_precision > 0.0 && self.min_precision <= 1.0)
        {
            return bad("learning_rate must be ≥ 0 and min_precision in (0, 1]".into());
        }
        if !(self.sharpening_rate >= 0.0) || !(self.max_sharpening >= 0.0) {
            return bad("sharpening_rate and max_sharpening must be ≥ 0".into());
        }
        let nyquist = self.sample_rate / 2.0;
        for (k, t) in self.classes.iter().enumerate() {
            let g = Gesture::ALL[k];
            if t.amplitude.len() != self.channels || t.band.len() != self.channels {
                return bad(format!("{g}: template has wrong channel count"));
            }
            if t.amplitude.iter().any(|a| !(*a >= 0.0)) {
                return bad(format!("{g}: negative amplitude"));
            }
            for &(lo, hi) in &t.band {
                if !(lo > 0.0 && hi > lo && hi < nyquist) {
                    return bad(format!("{g}: invalid band ({lo}, {hi}) Hz"));
                }
            }
        }
        Ok(())
    }

    /// Effective template of `g` after applying the separation knob.
    pub fn template(&self, g: Gesture) -> ClassTemplate {
        let rest = &self.classes[Gesture::Rest.index()];
        let own = &self.classes[g.index()];
        let s = self.separation;
        let lerp = |a: f64, b: f64| a + s * (b - a);
        ClassTemplate {
            amplitude: rest
                .amplitude
                .iter()
                .zip(&own.amplitude)
                .map(|(&r, &o)| lerp(r, o).max(0.0))
                .collect(),
            band: rest
                .band
                .iter()
                .zip(&own.band)
                .map(|(&(rl, rh), &(ol, oh))| {
                    let nyq = self.sample_rate / 2.0;
                    let lo = lerp(rl, ol).clamp(1.0, nyq * 0.9);
                    let hi = lerp(rh, oh).clamp(lo + 1.0, nyq * 0.95);
                    (lo, hi)
                })
                .collect(),
        }
    }

    /// Active gesture whose template is closest to that of `g`.
    pub fn nearest(&self, g: Gesture) -> Gesture {
        let own = self.template(g);
        let dist = |o: Gesture| {
            let t = self.template(o);
            let amp: f64 = own
                .amplitude
                .iter()
                .zip(&t.amplitude)
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            let band: f64 = own
                .band
                .iter()
                .zip(&t.band)
                .map(|(a, b)| ((a.0 * a.1).sqrt() / (b.0 * b.1).sqrt()).ln().powi(2))
                .sum();
            amp + band
        };
        Gesture::ACTIVE
            .iter()
            .copied()
            .filter(|&o| o != g)
            .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
            .expect("at least two active gestures")
    }

    /// Template of `g` pushed away from its nearest neighbour by `e`
    /// (amplitudes linearly, band edges in log frequency).
    pub fn sharpened(&self, g: Gesture, e: f64) -> ClassTemplate {
        let mut t = self.template(g);
        if e <= 0.0 || !g.is_active() {
            return t;
        }
        let n = self.template(self.nearest(g));
        let nyquist = self.sample_rate / 2.0;
        for (a, b) in t.amplitude.iter_mut().zip(&n.amplitude) {
            *a = (*a + e * (*a - b)).max(0.0);
        }
        for (band, other) in t.band.iter_mut().zip(&n.band) {
            let lo = (band.0 * (band.0 / other.0).powf(e)).clamp(1.0, nyquist * 0.9);
            let hi = (band.1 * (band.1 / other.1).powf(e)).clamp(lo + 1.0, nyquist * 0.95);
            *band = (lo, hi);
        }
        t
    }

    /// Long-run RMS per channel of a trial of `g` without variability.
    pub fn expected_rms(&self, g: Gesture) -> Vec<f64> {
        self.template(g)
            .amplitude
            .iter()
            .map(|a| (a * a + self.noise_floor * self.noise_floor).sqrt())
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
    z: [f64; 2],
}

impl Biquad {
    /// Constant 0 dB peak-gain band-pass centred at `sqrt(lo·hi)`.
    fn band_pass(lo: f64, hi: f64, fs: f64) -> Self {
        let f0 = (lo * hi).sqrt();
        let q = f0 / (hi - lo);
        let w0 = 2.0 * std::f64::consts::PI * f0 / fs;
        let alpha = w0.sin() / (2.0 * q);
        let a0 = 1.0 + alpha;
        Biquad {
            b: [alpha / a0, 0.0, -alpha / a0],
            a: [-2.0 * w0.cos() / a0, (1.0 - alpha) / a0],
            z: [0.0; 2],
        }
    }

    fn process(&mut self, x: f64) -> f64 {
        // transposed direct form II
        let y = self.b[0] * x + self.z[0];
        self.z[0] = self.b[1] * x - self.a[0] * y + self.z[1];
        self.z[1] = self.b[2] * x - self.a[1] * y;
        y
    }
}

#[derive(Debug, Clone, Copy)]
struct BandFilter {
    stages: [Biquad; 2],
    /// Output RMS for unit-variance white input.
    noise_gain: f64,
}

impl BandFilter {
    fn new(lo: f64, hi: f64, fs: f64) -> Self {
        let stage = Biquad::band_pass(lo, hi, fs);
        let mut probe = BandFilter {
            stages: [stage; 2],
            noise_gain: 1.0,
        };
        let mut energy = 0.0;
        for t in 0..16_384 {
            let y = probe.filter(if t == 0 { 1.0 } else { 0.0 });
            energy += y * y;
        }
        BandFilter {
            stages: [stage; 2],
            noise_gain: energy.sqrt(),
        }
    }

    fn filter(&mut self, x: f64) -> f64 {
        let y = self.stages[0].process(x);
        self.stages[1].process(y)
    }

    /// Switches coefficients, keeping the internal state.
    fn retune(&mut self, other: &BandFilter) {
        for (s, o) in self.stages.iter_mut().zip(&other.stages) {
            s.b = o.b;
            s.a = o.a;
        }
        self.noise_gain = other.noise_gain;
    }
}

/// Deterministic synthetic EMG stream.
#[derive(Debug, Clone)]
pub struct SyntheticSource {
    profile: SyntheticProfile,
    rng: ChaCha8Rng,
    filters: Vec<BandFilter>,
    filter_cache: HashMap<(u64, u64), BandFilter>,
    active: Gesture,
    amplitude: Vec<f64>,
    precision: [f64; NUM_CLASSES],
    sharpening: [f64; NUM_CLASSES],
    sequence: u64,
    follow_cues: bool,
}

impl SyntheticSource {
    pub fn new(profile: SyntheticProfile, seed: u64) -> Result<Self, SourceError> {
        profile.validate()?;
        let rest = profile.template(Gesture::Rest);
        let filters = rest
            .band
            .iter()
            .map(|&(lo, hi)| BandFilter::new(lo, hi, profile.sample_rate))
            .collect();
        let mut source = SyntheticSource {
            amplitude: rest.amplitude.clone(),
            profile,
            rng: ChaCha8Rng::seed_from_u64(seed),
            filters,
            filter_cache: HashMap::new(),
            active: Gesture::Rest,
            precision: [1.0; NUM_CLASSES],
            sharpening: [0.0; NUM_CLASSES],
            sequence: 0,
            follow_cues: true,
        };
        source.set_class(Gesture::Rest);
        Ok(source)
    }

    /// Ignore session cues; the class is then changed only by [`set_class`].
    ///
    /// [`set_class`]: SyntheticSource::set_class
    pub fn manual(mut self) -> Self {
        self.follow_cues = false;
        self
    }

    pub fn profile(&self) -> &SyntheticProfile {
        &self.profile
    }

    pub fn active(&self) -> Gesture {
        self.active
    }

    /// Multiplier on the per-trial variability of `g`; starts at 1.
    pub fn precision(&self, g: Gesture) -> f64 {
        self.precision[g.index()]
    }

    /// Exaggeration of the template of `g`; starts at 0.
    pub fn sharpening(&self, g: Gesture) -> f64 {
        self.sharpening[g.index()]
    }

    /// Starts producing `g` from the next packet, drawing fresh per-trial
    /// variability.
    pub fn set_class(&mut self, g: Gesture) {
        self.active = g;
        let p = self.precision[g.index()];
        let jitter = self.profile.jitter * p;
        let mut template = self.profile.sharpened(g, self.sharpening[g.index()]);
        if g.is_active() && self.profile.confusion > 0.0 {
            let others: Vec<Gesture> = Gesture::ACTIVE
                .iter()
                .copied()
                .filter(|&o| o != g)
                .collect();
            let other = others[self.rng.random_range(0..others.len())];
            let beta = self.rng.random_range(0.0..1.0) * (self.profile.confusion * p).min(1.0);
            let alt = self.profile.template(other);
            for (a, b) in template.amplitude.iter_mut().zip(&alt.amplitude) {
                *a = (1.0 - beta) * *a + beta * b;
            }
            for (band, alt) in template.band.iter_mut().zip(&alt.band) {
                band.0 = (1.0 - beta) * band.0 + beta * alt.0;
                band.1 = (1.0 - beta) * band.1 + beta * alt.1;
            }
        }
        if self.profile.band_jitter > 0.0 {
            let nyquist = self.profile.sample_rate / 2.0;
            for band in template.band.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut self.rng);
                let k = (self.profile.band_jitter * p * z).exp();
                let lo = (band.0 * k).clamp(1.0, nyquist * 0.9);
                *band = (lo, (band.1 * k).clamp(lo + 1.0, nyquist * 0.95));
            }
        }
        self.amplitude = template
            .amplitude
            .iter()
            .map(|&a| {
                let z: f64 = StandardNormal.sample(&mut self.rng);
                a * (1.0 + jitter * z).max(0.05)
            })
            .collect();
        for (ch, &(lo, hi)) in template.band.iter().enumerate() {
            let key = (lo.to_bits(), hi.to_bits());
            let fs = self.profile.sample_rate;
            let fresh = *self
                .filter_cache
                .entry(key)
                .or_insert_with(|| BandFilter::new(lo, hi, fs));
            self.filters[ch].retune(&fresh);
        }
    }
}

impl SignalSource for SyntheticSource {
    fn channels(&self) -> usize {
        self.profile.channels
    }

    fn sample_rate(&self) -> f64 {
        self.profile.sample_rate
    }

    fn packet_len(&self) -> usize {
        self.profile.packet_len
    }

    fn next_packet(&mut self) -> Result<Option<SourcePacket>, SourceError> {
        let len = self.profile.packet_len;
        let floor = self.profile.noise_floor;
        let mut samples = Vec::with_capacity(self.profile.channels);
        for (filter, &amp) in self.filters.iter_mut().zip(&self.amplitude) {
            let gain = amp / filter.noise_gain;
            let mut ch = Vec::with_capacity(len);
            for _ in 0..len {
                let drive: f64 = StandardNormal.sample(&mut self.rng);
                let hiss: f64 = StandardNormal.sample(&mut self.rng);
                ch.push(gain * filter.filter(drive) + floor * hiss);
            }
            samples.push(ch);
        }
        let packet = SourcePacket {
            samples,
            sequence: self.sequence,
            timestamp: (self.sequence * len as u64) as f64 / self.profile.sample_rate,
        };
        self.sequence += 1;
        Ok(Some(packet))
    }

    fn cue(&mut self, cue: &Cue) {
        if !self.follow_cues {
            return;
        }
        let target = match (cue.phase, cue.gesture) {
            (Phase::Production, Some(g)) => g,
            (Phase::Production, None) => return,
            _ => Gesture::Rest,
        };
        if target != self.active || cue.phase == Phase::Production {
            self.set_class(target);
        }
    }

    fn feedback(&mut self, displayed: &ProbabilityVector, target: Gesture) {
        if displayed.len() != NUM_CLASSES || !target.is_active() {
            return;
        }
        let error = 1.0 - displayed.get(target.index());
        let k = target.index();
        let p = &mut self.precision[k];
        *p = (*p * (1.0 - self.profile.learning_rate * error)).max(self.profile.min_precision);
        let e = &mut self.sharpening[k];
        *e = (*e + self.profile.sharpening_rate * error).min(self.profile.max_sharpening);
    }
}
