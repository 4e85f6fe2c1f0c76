//! Trial records, session events and the line-delimited log.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::config::{FeedbackCondition, SessionConfig};
use super::game::{GameState, MoveEffect};
use super::{EpochColor, Phase, SessionError};
use crate::classifier::{Decision, GestureModel, Outcome, ProbabilityVector};
use crate::gesture::Gesture;
use crate::signal::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub block: u8,
    /// Index within the block.
    pub trial: usize,
    pub game: Option<usize>,
    /// Instructed gesture, or the operator's label in the free games.
    pub intended: Gesture,
    /// Absent when no model was available.
    pub decision: Option<Decision>,
    pub probabilities: Option<ProbabilityVector>,
    pub features: Option<FeatureVector>,
    /// Absolute sample index at which the trial began.
    pub start_sample: u64,
    pub phases: super::PhaseSamples,
    /// Absolute feature window `[start, end)`.
    pub extraction: Option<(u64, u64)>,
    /// Published probability frames (live-feedback block).
    pub frames: Option<usize>,
    pub game_move: Option<MoveEffect>,
    pub game_move_applied: bool,
    pub aborted: bool,
}

impl TrialRecord {
    pub fn outcome(&self) -> Option<Outcome> {
        self.decision.map(|d| d.outcome)
    }

    /// Decision equals the intended label. `NoClass` is never correct.
    pub fn is_correct(&self) -> Option<bool> {
        self.outcome().map(|o| o == Outcome::Label(self.intended))
    }
}

/// One published probability vector of the live-feedback stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityFrame {
    pub block: u8,
    pub trial: usize,
    pub gesture: Gesture,
    /// Index within the trial.
    pub frame: usize,
    pub sample: u64,
    pub raw: ProbabilityVector,
    pub smoothed: ProbabilityVector,
    /// What the participant sees.
    pub published: ProbabilityVector,
    pub threshold: f64,
    pub condition: FeedbackCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockState {
    Started,
    Training,
    Completed,
    Skipped,
    /// A free game hit its trial cap.
    Capped,
    Failed,
    Paused,
    Resumed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum SessionEvent {
    SessionStarted {
        config: Box<SessionConfig>,
        source: String,
    },
    BlockStatus {
        block: u8,
        status: BlockState,
        detail: Option<String>,
    },
    PhaseUpdate {
        block: u8,
        trial: usize,
        phase: Phase,
        color: EpochColor,
        sample: u64,
        duration_samples: usize,
    },
    Instruction {
        block: u8,
        trial: usize,
        game: Option<usize>,
        /// `None` when the subject picks the gesture.
        gesture: Option<Gesture>,
        text: String,
    },
    ProbabilityFrame(ProbabilityFrame),
    GameSnapshot {
        block: u8,
        game: usize,
        /// `None` for the initial state of a game.
        trial: Option<usize>,
        state: GameState,
        complete: bool,
    },
    TrialResult(TrialRecord),
    ModelTrained {
        block: u8,
        model: Box<GestureModel>,
    },
    SessionFinished {
        trials: usize,
    },
}

impl SessionEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            SessionEvent::SessionStarted { .. } => "SessionStarted",
            SessionEvent::BlockStatus { .. } => "BlockStatus",
            SessionEvent::PhaseUpdate { .. } => "PhaseUpdate",
            SessionEvent::Instruction { .. } => "Instruction",
            SessionEvent::ProbabilityFrame(_) => "ProbabilityFrame",
            SessionEvent::GameSnapshot { .. } => "GameSnapshot",
            SessionEvent::TrialResult(_) => "TrialResult",
            SessionEvent::ModelTrained { .. } => "ModelTrained",
            SessionEvent::SessionFinished { .. } => "SessionFinished",
        }
    }
}

/// A log line: sequence number, session time in seconds, event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    pub time: f64,
    #[serde(flatten)]
    pub event: SessionEvent,
}

impl LogEntry {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("log entries serialize")
    }
}

pub trait EventSink: Send {
    fn emit(&mut self, entry: &LogEntry) -> Result<(), SessionError>;

    fn flush(&mut self) -> Result<(), SessionError> {
        Ok(())
    }
}

/// Appends one JSON object per line.
pub struct JsonlSink<W: Write + Send> {
    out: W,
}

impl JsonlSink<std::io::BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self, SessionError> {
        Ok(JsonlSink {
            out: std::io::BufWriter::new(File::create(path)?),
        })
    }
}

impl<W: Write + Send> JsonlSink<W> {
    pub fn new(out: W) -> Self {
        JsonlSink { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write + Send> EventSink for JsonlSink<W> {
    fn emit(&mut self, entry: &LogEntry) -> Result<(), SessionError> {
        writeln!(self.out, "{}", entry.to_line())?;
        Ok(())
    }

    fn flush(&mut self) -> Result<(), SessionError> {
        self.out.flush()?;
        Ok(())
    }
}

/// In-memory log shared with the caller.
#[derive(Debug, Clone, Default)]
pub struct SharedLog {
    entries: Arc<Mutex<Vec<LogEntry>>>,
    skip_frames: bool,
}

impl SharedLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Keeps everything except live probability frames.
    pub fn without_frames() -> Self {
        SharedLog {
            skip_frames: true,
            ..Self::default()
        }
    }

    pub fn entries(&self) -> Vec<LogEntry> {
        self.entries.lock().expect("log lock").clone()
    }

    pub fn records(&self) -> Vec<TrialRecord> {
        records(&self.entries.lock().expect("log lock"))
    }
}

impl EventSink for SharedLog {
    fn emit(&mut self, entry: &LogEntry) -> Result<(), SessionError> {
        if !(self.skip_frames && matches!(entry.event, SessionEvent::ProbabilityFrame(_))) {
            self.entries.lock().expect("log lock").push(entry.clone());
        }
        Ok(())
    }
}

impl<F: FnMut(&LogEntry) + Send> EventSink for F {
    fn emit(&mut self, entry: &LogEntry) -> Result<(), SessionError> {
        self(entry);
        Ok(())
    }
}

/// Parses a log file, rejecting any malformed line.
pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<LogEntry>, SessionError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: LogEntry = serde_json::from_str(&line).map_err(|e| SessionError::Log {
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(entry);
    }
    Ok(out)
}

/// Trial records in log order.
pub fn records(entries: &[LogEntry]) -> Vec<TrialRecord> {
    entries
        .iter()
        .filter_map(|e| match &e.event {
            SessionEvent::TrialResult(r) => Some(r.clone()),
            _ => None,
        })
        .collect()
}
