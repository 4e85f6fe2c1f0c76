//! The four-block training protocol.
//!
//! A session is a deterministic state machine driven entirely by the sample
//! count it has consumed, so a simulated run and a real-time run of the same
//! stream produce the same log.
//!
//! 1. calibration: 48 instructed trials, then a first model
//! 2. instructed games: 4 balanced six-move games, then a retrained model
//! 3. live feedback: one 30 s trial per active gesture (skipped for Control)
//! 4. free games: 12 games driven by the classifier's decisions

mod config;
mod engine;
mod game;
mod intent;
mod reader;
mod record;
mod replay;

pub use config::{FeedbackCondition, PhaseSamples, SessionConfig, TrialTiming};
pub use engine::{Session, SessionControl, SessionOutcome};
pub use game::{
    apply_gesture, apply_outcome, effect, generate_balanced_games, generate_game, Avatar,
    GameError, GameState, GridConfig, InstructedGame, MoveEffect, GAME_DISTANCE,
};
pub use intent::{IntentContext, IntentProvider, QueuedIntents, ScriptedSubject};
pub use reader::SampleReader;
pub use record::{
    read_log, records, BlockState, EventSink, JsonlSink, LogEntry, ProbabilityFrame, SessionEvent,
    SharedLog, TrialRecord,
};
pub use replay::{replay_games, ReplayError};

use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierError;
use crate::signal::SignalError;
use crate::sources::SourceError;

/// Epoch within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Prompt,
    Production,
    Recovery,
}

/// Border colour cueing each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpochColor {
    Yellow,
    Green,
    Red,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Prompt, Phase::Production, Phase::Recovery];

    pub fn color(self) -> EpochColor {
        match self {
            Phase::Prompt => EpochColor::Yellow,
            Phase::Production => EpochColor::Green,
            Phase::Recovery => EpochColor::Red,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("block {block} failed: {aborted} of {trials} trials aborted")]
    BlockFailed {
        block: u8,
        aborted: usize,
        trials: usize,
    },
    #[error("block {0} requires a trained model")]
    MissingModel(u8),
    #[error("intent unavailable: {0}")]
    IntentUnavailable(String),
    #[error("session aborted")]
    Aborted,
    #[error("log line {line}: {reason}")]
    Log { line: usize, reason: String },
}
