use std::sync::{Arc, Condvar, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{FeedbackCondition, PhaseSamples, SessionConfig};
use super::game::{
    apply_gesture, apply_outcome, generate_balanced_games, generate_game, MoveEffect, GAME_DISTANCE,
};
use super::intent::{IntentContext, IntentProvider};
use super::reader::SampleReader;
use super::record::{BlockState, EventSink, LogEntry, ProbabilityFrame, SessionEvent, TrialRecord};
use super::{Phase, SessionError};
use crate::classifier::{
    decide, modify, train_full, Decision, EmaSmoother, GestureModel, ProbabilityVector,
};
use crate::gesture::Gesture;
use crate::signal::{extract_features, FeatureVector, FrameAccumulator, SampleWindow};
use crate::sources::{Cue, SignalSource};

#[derive(Debug, Default)]
struct ControlState {
    paused: bool,
    aborted: bool,
    awaiting_intent: bool,
}

/// Cross-thread handle for pausing or aborting a running session.
///
/// Both take effect at the next trial boundary.
#[derive(Debug, Clone, Default)]
pub struct SessionControl {
    inner: Arc<(Mutex<ControlState>, Condvar)>,
}

impl SessionControl {
    pub fn new() -> Self {
        Self::default()
    }

    fn update(&self, f: impl FnOnce(&mut ControlState)) {
        let (lock, cv) = &*self.inner;
        f(&mut lock.lock().expect("control lock"));
        cv.notify_all();
    }

    fn read<T>(&self, f: impl FnOnce(&ControlState) -> T) -> T {
        f(&self.inner.0.lock().expect("control lock"))
    }

    pub fn pause(&self) {
        self.update(|s| s.paused = true)
    }

    pub fn resume(&self) {
        self.update(|s| s.paused = false)
    }

    pub fn abort(&self) {
        self.update(|s| s.aborted = true)
    }

    pub fn is_paused(&self) -> bool {
        self.read(|s| s.paused)
    }

    pub fn is_aborted(&self) -> bool {
        self.read(|s| s.aborted)
    }

    pub fn awaiting_intent(&self) -> bool {
        self.read(|s| s.awaiting_intent)
    }

    pub fn set_awaiting_intent(&self, v: bool) {
        self.update(|s| s.awaiting_intent = v)
    }

    /// Blocks while paused. Returns whether a pause happened.
    fn wait(&self) -> Result<bool, SessionError> {
        let (lock, cv) = &*self.inner;
        let mut s = lock.lock().expect("control lock");
        let mut waited = false;
        while s.paused && !s.aborted {
            waited = true;
            s = cv.wait(s).expect("control lock");
        }
        if s.aborted {
            return Err(SessionError::Aborted);
        }
        Ok(waited)
    }
}

#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub records: Vec<TrialRecord>,
    pub block1_model: GestureModel,
    pub block2_model: GestureModel,
}

/// Raw result of one timed trial.
struct Trial {
    start: u64,
    phases: PhaseSamples,
    window: Option<(u64, Vec<Vec<f64>>)>,
    frames: usize,
    aborted: bool,
}

pub struct Session<S> {
    config: SessionConfig,
    reader: SampleReader<S>,
    sinks: Vec<Box<dyn EventSink>>,
    control: SessionControl,
    rng: ChaCha8Rng,
    seq: u64,
    source_name: String,
    started: bool,
}

impl<S: SignalSource> Session<S> {
    pub fn new(config: SessionConfig, source: S) -> Result<Self, SessionError> {
        config.validate()?;
        if !(source.sample_rate() > 0.0) || source.channels() == 0 {
            return Err(SessionError::Config(
                "source has no channels or no sample rate".into(),
            ));
        }
        let window = config.timing.window(source.sample_rate());
        if window < 4 {
            return Err(SessionError::Config(format!(
                "feature window of {window} samples is too short"
            )));
        }
        Ok(Session {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            reader: SampleReader::new(source),
            sinks: Vec::new(),
            control: SessionControl::new(),
            seq: 0,
            source_name: String::from("unnamed"),
            started: false,
        })
    }

    pub fn with_sink(mut self, sink: impl EventSink + 'static) -> Self {
        self.sinks.push(Box::new(sink));
        self
    }

    pub fn add_sink(&mut self, sink: Box<dyn EventSink>) {
        self.sinks.push(sink);
    }

    pub fn with_control(mut self, control: SessionControl) -> Self {
        self.control = control;
        self
    }

    pub fn with_source_name(mut self, name: impl Into<String>) -> Self {
        self.source_name = name.into();
        self
    }

    pub fn control(&self) -> SessionControl {
        self.control.clone()
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn source(&self) -> &S {
        self.reader.source()
    }

    pub fn into_source(self) -> S {
        self.reader.into_source()
    }

    /// Samples consumed so far.
    pub fn position(&self) -> u64 {
        self.reader.position()
    }

    fn rate(&self) -> f64 {
        self.reader.sample_rate()
    }

    fn emit(&mut self, event: SessionEvent) -> Result<(), SessionError> {
        let entry = LogEntry {
            seq: self.seq,
            time: self.reader.position() as f64 / self.rate(),
            event,
        };
        self.seq += 1;
        for sink in &mut self.sinks {
            sink.emit(&entry)?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), SessionError> {
        for sink in &mut self.sinks {
            sink.flush()?;
        }
        Ok(())
    }

    fn start(&mut self) -> Result<(), SessionError> {
        if !self.started {
            self.started = true;
            self.emit(SessionEvent::SessionStarted {
                config: Box::new(self.config.clone()),
                source: self.source_name.clone(),
            })?;
        }
        Ok(())
    }

    fn status(
        &mut self,
        block: u8,
        status: BlockState,
        detail: Option<String>,
    ) -> Result<(), SessionError> {
        self.emit(SessionEvent::BlockStatus {
            block,
            status,
            detail,
        })?;
        self.flush()
    }

    /// Trial boundary: honours pause and abort requests.
    fn boundary(&mut self, block: u8) -> Result<(), SessionError> {
        if self.control.is_paused() {
            self.status(block, BlockState::Paused, None)?;
        }
        match self.control.wait() {
            Ok(true) => self.status(block, BlockState::Resumed, None),
            Ok(false) => Ok(()),
            Err(e) => {
                self.status(block, BlockState::Failed, Some("aborted".into()))?;
                Err(e)
            }
        }
    }

    fn enter_phase(
        &mut self,
        block: u8,
        trial: usize,
        phase: Phase,
        gesture: Option<Gesture>,
        len: usize,
    ) -> Result<(), SessionError> {
        self.emit(SessionEvent::PhaseUpdate {
            block,
            trial,
            phase,
            color: phase.color(),
            sample: self.reader.position(),
            duration_samples: len,
        })?;
        self.reader.cue(&Cue {
            block,
            phase,
            gesture,
        });
        Ok(())
    }

    /// Prompt, production, recovery. Keeps the last feature window of
    /// production; in the live block, streams feedback through `live`.
    fn timed_trial(
        &mut self,
        block: u8,
        trial: usize,
        gesture: Option<Gesture>,
        mut live: Option<&mut LiveFeedback>,
    ) -> Result<Trial, SessionError> {
        let phases = self.config.timing.samples(block, self.rate());
        let window = self.config.timing.window(self.rate());
        let mut out = Trial {
            start: self.reader.position(),
            phases,
            window: None,
            frames: 0,
            aborted: false,
        };
        for phase in Phase::ALL {
            let len = phases.get(phase);
            self.enter_phase(block, trial, phase, gesture, len)?;
            if out.aborted {
                continue;
            }
            if phase != Phase::Production {
                if self.reader.read(len)?.is_none() {
                    out.aborted = true;
                }
                continue;
            }
            if let Some(live) = live.as_deref_mut() {
                live.reset();
                let chunk = self.reader.source().packet_len().max(1);
                let mut left = len;
                while left > 0 {
                    let n = left.min(chunk);
                    let Some(data) = self.reader.read(n)? else {
                        out.aborted = true;
                        break;
                    };
                    left -= n;
                    for w in live.acc.push(&data)? {
                        let frame =
                            live.frame(&w, block, trial, out.frames, self.reader.position())?;
                        self.reader
                            .source_mut()
                            .feedback(&frame.published, frame.gesture);
                        self.emit(SessionEvent::ProbabilityFrame(frame))?;
                        out.frames += 1;
                    }
                }
            } else {
                match self.reader.read(len)? {
                    Some(data) => {
                        let start = self.reader.position() - window as u64;
                        let tail = data
                            .into_iter()
                            .map(|ch| ch[len - window..].to_vec())
                            .collect();
                        out.window = Some((start, tail));
                    }
                    None => out.aborted = true,
                }
            }
        }
        Ok(out)
    }

    fn features(&self, trial: &Trial) -> Result<Option<(FeatureVector, (u64, u64))>, SessionError> {
        let Some((start, data)) = &trial.window else {
            return Ok(None);
        };
        let len = data[0].len() as u64;
        let w = SampleWindow::new(data.clone(), self.rate())?;
        Ok(Some((extract_features(&w)?, (*start, start + len))))
    }

    fn record(
        &self,
        block: u8,
        index: usize,
        game: Option<usize>,
        intended: Gesture,
        trial: &Trial,
        model: Option<&GestureModel>,
    ) -> Result<TrialRecord, SessionError> {
        let feats = self.features(trial)?;
        let (probabilities, decision) = match (&feats, model) {
            (Some((f, _)), Some(m)) => {
                let p = m.predict(f)?;
                let d = decide(&p, self.config.threshold)?;
                (Some(p), Some(d))
            }
            _ => (None, None),
        };
        let extraction = feats.as_ref().map(|(_, r)| *r);
        Ok(TrialRecord {
            block,
            trial: index,
            game,
            intended,
            decision,
            probabilities,
            features: feats.map(|(f, _)| f),
            start_sample: trial.start,
            phases: trial.phases,
            extraction,
            frames: None,
            game_move: None,
            game_move_applied: false,
            aborted: trial.aborted,
        })
    }

    fn train(&mut self, block: u8, records: &[&TrialRecord]) -> Result<GestureModel, SessionError> {
        self.status(
            block,
            BlockState::Training,
            Some(format!("{} samples", records.len())),
        )?;
        let feats: Vec<FeatureVector> = records.iter().filter_map(|r| r.features.clone()).collect();
        let labels: Vec<Gesture> = records
            .iter()
            .filter(|r| r.features.is_some())
            .map(|r| r.intended)
            .collect();
        let model = train_full(&feats, &labels, &self.config.model)?;
        self.emit(SessionEvent::ModelTrained {
            block,
            model: Box::new(model.clone()),
        })?;
        Ok(model)
    }

    fn check_aborted(&mut self, block: u8, records: &[TrialRecord]) -> Result<(), SessionError> {
        let aborted = records.iter().filter(|r| r.aborted).count();
        if aborted == 0 {
            return Ok(());
        }
        let detail = format!("{aborted} of {} trials aborted", records.len());
        self.status(block, BlockState::Failed, Some(detail))?;
        Err(SessionError::BlockFailed {
            block,
            aborted,
            trials: records.len(),
        })
    }

    /// Calibration: each active gesture five times in a row, then rest.
    pub fn run_block1(&mut self) -> Result<(Vec<TrialRecord>, GestureModel), SessionError> {
        self.start()?;
        self.status(1, BlockState::Started, None)?;
        let mut plan = Vec::new();
        for g in Gesture::ACTIVE {
            plan.extend(std::iter::repeat_n(g, self.config.block1_repetitions));
        }
        plan.extend(std::iter::repeat_n(Gesture::Rest, self.config.block1_rest));
        let mut records = Vec::with_capacity(plan.len());
        for (i, &g) in plan.iter().enumerate() {
            self.boundary(1)?;
            self.emit(SessionEvent::Instruction {
                block: 1,
                trial: i,
                game: None,
                gesture: Some(g),
                text: format!("Perform {g}"),
            })?;
            let trial = self.timed_trial(1, i, Some(g), None)?;
            let rec = self.record(1, i, None, g, &trial, None)?;
            self.emit(SessionEvent::TrialResult(rec.clone()))?;
            records.push(rec);
        }
        self.check_aborted(1, &records)?;
        let refs: Vec<&TrialRecord> = records.iter().collect();
        let model = self.train(1, &refs)?;
        self.status(1, BlockState::Completed, None)?;
        Ok((records, model))
    }

    /// Instructed games with post-hoc display from the calibration model,
    /// then a model retrained from scratch on blocks 1 and 2.
    pub fn run_block2(
        &mut self,
        model: &GestureModel,
        block1: &[TrialRecord],
    ) -> Result<(Vec<TrialRecord>, GestureModel), SessionError> {
        self.start()?;
        self.status(2, BlockState::Started, None)?;
        let games = generate_balanced_games(
            &mut self.rng,
            &self.config.grid,
            self.config.block2_games,
            GAME_DISTANCE,
        )?;
        let mut records = Vec::new();
        for (gi, game) in games.iter().enumerate() {
            let mut state = game.state;
            self.emit(SessionEvent::GameSnapshot {
                block: 2,
                game: gi,
                trial: None,
                state,
                complete: state.is_complete(),
            })?;
            for &g in &game.gestures {
                let i = records.len();
                self.boundary(2)?;
                self.emit(SessionEvent::Instruction {
                    block: 2,
                    trial: i,
                    game: Some(gi),
                    gesture: Some(g),
                    text: format!("Perform {g}"),
                })?;
                let trial = self.timed_trial(2, i, Some(g), None)?;
                let mut rec = self.record(2, i, Some(gi), g, &trial, Some(model))?;
                if !rec.aborted {
                    let (next, effect) = apply_gesture(&state, g);
                    state = next;
                    rec.game_move = Some(effect);
                    rec.game_move_applied = effect == MoveEffect::Applied;
                }
                self.emit(SessionEvent::TrialResult(rec.clone()))?;
                self.emit(SessionEvent::GameSnapshot {
                    block: 2,
                    game: gi,
                    trial: Some(i),
                    state,
                    complete: state.is_complete(),
                })?;
                records.push(rec);
            }
        }
        self.check_aborted(2, &records)?;
        let pooled: Vec<&TrialRecord> = block1.iter().chain(&records).collect();
        let retrained = self.train(2, &pooled)?;
        self.status(2, BlockState::Completed, None)?;
        Ok((records, retrained))
    }

    /// Live feedback: one long production epoch per gesture, streaming
    /// smoothed (and, under `Modified`, flattened) probabilities.
    pub fn run_block3(&mut self, model: &GestureModel) -> Result<Vec<TrialRecord>, SessionError> {
        self.start()?;
        if self.config.condition == FeedbackCondition::Control {
            self.status(3, BlockState::Skipped, Some("control condition".into()))?;
            return Ok(Vec::new());
        }
        self.status(3, BlockState::Started, None)?;
        let mut live = LiveFeedback::new(
            model.clone(),
            &self.config,
            self.reader.channels(),
            self.rate(),
        )?;
        let order = self.config.block3_order.clone();
        let mut records = Vec::new();
        for (i, &g) in order.iter().enumerate() {
            self.boundary(3)?;
            self.emit(SessionEvent::Instruction {
                block: 3,
                trial: i,
                game: None,
                gesture: Some(g),
                text: format!("Hold {g}"),
            })?;
            live.gesture = g;
            let trial = self.timed_trial(3, i, Some(g), Some(&mut live))?;
            let mut rec = self.record(3, i, None, g, &trial, None)?;
            rec.frames = Some(trial.frames);
            self.emit(SessionEvent::TrialResult(rec.clone()))?;
            let aborted = rec.aborted;
            records.push(rec);
            if aborted {
                break;
            }
        }
        self.check_aborted(3, &records)?;
        self.status(3, BlockState::Completed, None)?;
        Ok(records)
    }

    /// Free games: the avatar follows the classifier's decisions.
    pub fn run_block4(
        &mut self,
        model: &GestureModel,
        intents: &mut dyn IntentProvider,
    ) -> Result<Vec<TrialRecord>, SessionError> {
        self.start()?;
        self.status(4, BlockState::Started, None)?;
        let mut records: Vec<TrialRecord> = Vec::new();
        'games: for gi in 0..self.config.block4_games {
            let mut state = generate_game(&mut self.rng, &self.config.grid, GAME_DISTANCE)?;
            self.emit(SessionEvent::GameSnapshot {
                block: 4,
                game: gi,
                trial: None,
                state,
                complete: false,
            })?;
            let mut in_game = 0;
            while !state.is_complete() && in_game < self.config.block4_trial_cap {
                let i = records.len();
                self.boundary(4)?;
                let mut ctx = IntentContext {
                    block: 4,
                    game: gi,
                    trial: i,
                    state,
                    planned: None,
                    decision: None,
                };
                ctx.planned = intents.plan(&ctx);
                self.emit(SessionEvent::Instruction {
                    block: 4,
                    trial: i,
                    game: Some(gi),
                    gesture: None,
                    text: "Move the avatar onto the target".into(),
                })?;
                let trial = self.timed_trial(4, i, ctx.planned, None)?;
                let mut rec = self.record(4, i, Some(gi), Gesture::Rest, &trial, Some(model))?;
                if rec.aborted {
                    self.emit(SessionEvent::TrialResult(rec.clone()))?;
                    records.push(rec);
                    break 'games;
                }
                ctx.decision = rec.decision;
                rec.intended = intents.intent(&ctx)?;
                let decision: Decision = rec.decision.expect("model present");
                let (next, effect) = apply_outcome(&state, decision.outcome);
                state = next;
                rec.game_move = Some(effect);
                rec.game_move_applied = effect == MoveEffect::Applied;
                self.emit(SessionEvent::TrialResult(rec.clone()))?;
                self.emit(SessionEvent::GameSnapshot {
                    block: 4,
                    game: gi,
                    trial: Some(i),
                    state,
                    complete: state.is_complete(),
                })?;
                records.push(rec);
                in_game += 1;
            }
            if !state.is_complete() {
                self.status(
                    4,
                    BlockState::Capped,
                    Some(format!("game {gi} stopped after {in_game} trials")),
                )?;
            }
        }
        self.check_aborted(4, &records)?;
        self.status(4, BlockState::Completed, None)?;
        Ok(records)
    }

    /// All four blocks.
    pub fn run(
        &mut self,
        intents: &mut dyn IntentProvider,
    ) -> Result<SessionOutcome, SessionError> {
        let (mut records, m1) = self.run_block1()?;
        let (b2, m2) = self.run_block2(&m1, &records)?;
        records.extend(b2);
        records.extend(self.run_block3(&m2)?);
        records.extend(self.run_block4(&m2, intents)?);
        self.emit(SessionEvent::SessionFinished {
            trials: records.len(),
        })?;
        self.flush()?;
        Ok(SessionOutcome {
            records,
            block1_model: m1,
            block2_model: m2,
        })
    }
}

/// Streaming state of the live-feedback block.
struct LiveFeedback {
    model: GestureModel,
    acc: FrameAccumulator,
    smoother: EmaSmoother,
    condition: FeedbackCondition,
    m: f64,
    threshold: f64,
    gesture: Gesture,
}

impl LiveFeedback {
    fn new(
        model: GestureModel,
        config: &SessionConfig,
        channels: usize,
        rate: f64,
    ) -> Result<Self, SessionError> {
        Ok(LiveFeedback {
            model,
            acc: FrameAccumulator::with_seconds(
                channels,
                config.timing.window_s,
                config.timing.step_s,
                rate,
            )?,
            smoother: EmaSmoother::new(crate::gesture::NUM_CLASSES, config.lambda)?,
            condition: config.condition,
            m: config.m,
            threshold: config.threshold,
            gesture: Gesture::Rest,
        })
    }

    fn reset(&mut self) {
        self.acc.reset();
        self.smoother.reset();
    }

    fn frame(
        &mut self,
        w: &SampleWindow,
        block: u8,
        trial: usize,
        frame: usize,
        sample: u64,
    ) -> Result<ProbabilityFrame, SessionError> {
        let f = extract_features(w)?;
        let raw = self.model.predict(&f)?;
        let smoothed: ProbabilityVector = self.smoother.update(&raw)?.clone();
        let published = match self.condition {
            FeedbackCondition::Modified => modify(smoothed.as_slice(), self.m)?,
            _ => smoothed.clone(),
        };
        Ok(ProbabilityFrame {
            block,
            trial,
            gesture: self.gesture,
            frame,
            sample,
            raw,
            smoothed,
            published,
            threshold: self.threshold,
            condition: self.condition,
        })
    }
}
