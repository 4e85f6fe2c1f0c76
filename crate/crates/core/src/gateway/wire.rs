//! Messages exchanged with UI clients.
//!
//! Every WebSocket text frame carries one JSON object:
//!
//! ```json
//! {"v":1,"kind":"ProbabilityFrame","session_id":"s1","frame":812,"payload":{...}}
//! ```
//!
//! `frame` increases by one per message sent on a connection. Messages of an
//! unknown kind or version are rejected with an `Error` reply.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::gesture::{Gesture, NUM_CLASSES};
use crate::session::{LogEntry, SessionEvent};

pub const WIRE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WireKind {
    PhaseUpdate,
    ProbabilityFrame,
    GameSnapshot,
    Instruction,
    TrialResult,
    BlockStatus,
    Command,
    IntentEntry,
    Error,
}

impl WireKind {
    pub const ALL: [WireKind; 9] = [
        WireKind::PhaseUpdate,
        WireKind::ProbabilityFrame,
        WireKind::GameSnapshot,
        WireKind::Instruction,
        WireKind::TrialResult,
        WireKind::BlockStatus,
        WireKind::Command,
        WireKind::IntentEntry,
        WireKind::Error,
    ];

    pub fn from_name(name: &str) -> Option<WireKind> {
        WireKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            WireKind::PhaseUpdate => "PhaseUpdate",
            WireKind::ProbabilityFrame => "ProbabilityFrame",
            WireKind::GameSnapshot => "GameSnapshot",
            WireKind::Instruction => "Instruction",
            WireKind::TrialResult => "TrialResult",
            WireKind::BlockStatus => "BlockStatus",
            WireKind::Command => "Command",
            WireKind::IntentEntry => "IntentEntry",
            WireKind::Error => "Error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Sees only what the subject may see.
    #[default]
    Participant,
    /// Also sees veridical vectors and may enter intents.
    Operator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireMessage {
    pub v: u32,
    pub kind: WireKind,
    pub session_id: String,
    pub frame: u64,
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WireError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("unsupported protocol version {0}")]
    Version(u64),
    #[error("unknown message kind `{0}`")]
    UnknownKind(String),
    #[error("invalid {kind} payload: {reason}")]
    Payload { kind: &'static str, reason: String },
}

impl WireMessage {
    pub fn new(kind: WireKind, session_id: &str, frame: u64, payload: Value) -> Self {
        WireMessage {
            v: WIRE_VERSION,
            kind,
            session_id: session_id.to_string(),
            frame,
            payload,
        }
    }

    pub fn error(session_id: &str, frame: u64, message: impl Into<String>) -> Self {
        Self::new(
            WireKind::Error,
            session_id,
            frame,
            json!({ "message": message.into() }),
        )
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("wire messages serialize")
    }

    /// Strict parse: version and kind are checked before the payload.
    pub fn parse(text: &str) -> Result<WireMessage, WireError> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| WireError::Malformed(e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| WireError::Malformed("not an object".into()))?;
        let version = obj
            .get("v")
            .and_then(Value::as_u64)
            .ok_or_else(|| WireError::Malformed("missing `v`".into()))?;
        if version != WIRE_VERSION as u64 {
            return Err(WireError::Version(version));
        }
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| WireError::Malformed("missing `kind`".into()))?;
        if WireKind::from_name(kind).is_none() {
            return Err(WireError::UnknownKind(kind.to_string()));
        }
        serde_json::from_value(v).map_err(|e| WireError::Malformed(e.to_string()))
    }
}

/// Client requests carried by `Command`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Command {
    /// Must be the first message on a connection.
    Hello {
        #[serde(default)]
        role: Role,
        /// Ask to become the controlling client.
        #[serde(default)]
        control: bool,
    },
    Start,
    Pause,
    Resume,
    Abort,
    /// Drives a manually steered synthetic subject.
    SelectGesture {
        gesture: Gesture,
    },
}

impl Command {
    pub fn from_message(m: &WireMessage) -> Result<Command, WireError> {
        serde_json::from_value(m.payload.clone()).map_err(|e| WireError::Payload {
            kind: "Command",
            reason: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntentEntry {
    pub gesture: Gesture,
}

impl IntentEntry {
    pub fn from_message(m: &WireMessage) -> Result<IntentEntry, WireError> {
        serde_json::from_value(m.payload.clone()).map_err(|e| WireError::Payload {
            kind: "IntentEntry",
            reason: e.to_string(),
        })
    }
}

/// Class name to probability, canonical names as keys.
pub fn named(p: &[f64]) -> BTreeMap<&'static str, f64> {
    debug_assert_eq!(p.len(), NUM_CLASSES);
    Gesture::ALL
        .iter()
        .map(|g| g.name())
        .zip(p.iter().copied())
        .collect()
}

/// The wire form of a log entry as seen by `role`, or `None` for entries
/// clients never receive.
pub fn encode_event(entry: &LogEntry, role: Role) -> Option<(WireKind, Value)> {
    let operator = role == Role::Operator;
    let out = match &entry.event {
        SessionEvent::SessionStarted { config, .. } => (
            WireKind::BlockStatus,
            json!({ "block": 0, "status": "session_started", "detail": null,
                    "condition": if operator { Some(config.condition.name()) } else { None } }),
        ),
        SessionEvent::SessionFinished { trials } => (
            WireKind::BlockStatus,
            json!({ "block": 0, "status": "session_finished", "detail": format!("{trials} trials") }),
        ),
        SessionEvent::ModelTrained { block, model } => (
            WireKind::BlockStatus,
            json!({ "block": block, "status": "model_trained",
                    "detail": format!("{} samples", model.metadata.samples) }),
        ),
        SessionEvent::BlockStatus {
            block,
            status,
            detail,
        } => (
            WireKind::BlockStatus,
            json!({ "block": block, "status": status, "detail": detail }),
        ),
        SessionEvent::PhaseUpdate {
            block,
            trial,
            phase,
            color,
            sample,
            duration_samples,
        } => (
            WireKind::PhaseUpdate,
            json!({ "block": block, "trial": trial, "phase": phase, "color": color,
                    "sample": sample, "duration_samples": duration_samples, "time": entry.time }),
        ),
        SessionEvent::Instruction {
            block,
            trial,
            game,
            gesture,
            text,
        } => (
            WireKind::Instruction,
            json!({ "block": block, "trial": trial, "game": game, "gesture": gesture, "text": text }),
        ),
        SessionEvent::ProbabilityFrame(f) => {
            let mut payload = json!({
                "block": f.block, "trial": f.trial, "gesture": f.gesture, "frame": f.frame,
                "sample": f.sample, "probabilities": named(f.published.as_slice()),
                "threshold": f.threshold, "condition": f.condition,
            });
            if operator {
                payload["raw"] = json!(named(f.raw.as_slice()));
                payload["smoothed"] = json!(named(f.smoothed.as_slice()));
            }
            (WireKind::ProbabilityFrame, payload)
        }
        SessionEvent::GameSnapshot {
            block,
            game,
            trial,
            state,
            complete,
        } => (
            WireKind::GameSnapshot,
            json!({ "block": block, "game": game, "trial": trial, "state": state, "complete": complete }),
        ),
        SessionEvent::TrialResult(r) => {
            let mut payload = json!({
                "block": r.block, "trial": r.trial, "game": r.game, "intended": r.intended,
                "outcome": r.outcome(), "probabilities": r.probabilities.as_ref().map(|p| named(p.as_slice())),
                "game_move": r.game_move, "aborted": r.aborted,
            });
            if operator {
                payload["record"] = serde_json::to_value(r).expect("records serialize");
            }
            (WireKind::TrialResult, payload)
        }
    };
    Some(out)
}
