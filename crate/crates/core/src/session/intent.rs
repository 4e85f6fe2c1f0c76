use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::engine::SessionControl;
use super::game::GameState;
use super::SessionError;
use crate::classifier::Decision;
use crate::gesture::Gesture;

/// What is known about a free-game trial when its label is requested.
#[derive(Debug, Clone, Copy)]
pub struct IntentContext {
    pub block: u8,
    pub game: usize,
    pub trial: usize,
    pub state: GameState,
    pub planned: Option<Gesture>,
    pub decision: Option<Decision>,
}

/// Supplies the attempted gesture of each free-game trial.
pub trait IntentProvider {
    /// Called at trial start. A scripted subject returns the gesture it is
    /// about to perform; a human operator returns `None`.
    fn plan(&mut self, _ctx: &IntentContext) -> Option<Gesture> {
        None
    }

    /// Label for the finished trial. May block until one is entered.
    fn intent(&mut self, ctx: &IntentContext) -> Result<Gesture, SessionError>;
}

/// Attempts a random gesture that brings the avatar closer to the target,
/// and labels each trial with that attempt.
#[derive(Debug, Clone)]
pub struct ScriptedSubject {
    rng: ChaCha8Rng,
}

impl ScriptedSubject {
    pub fn new(seed: u64) -> Self {
        ScriptedSubject {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl IntentProvider for ScriptedSubject {
    fn plan(&mut self, ctx: &IntentContext) -> Option<Gesture> {
        let useful = ctx.state.useful_gestures();
        if useful.is_empty() {
            return Some(Gesture::Rest);
        }
        Some(useful[self.rng.random_range(0..useful.len())])
    }

    fn intent(&mut self, ctx: &IntentContext) -> Result<Gesture, SessionError> {
        ctx.planned
            .ok_or_else(|| SessionError::IntentUnavailable("scripted subject made no plan".into()))
    }
}

/// Operator labels arriving from another thread.
pub struct QueuedIntents {
    rx: Receiver<Gesture>,
    control: SessionControl,
}

impl QueuedIntents {
    pub fn channel(control: SessionControl) -> (Sender<Gesture>, QueuedIntents) {
        let (tx, rx) = mpsc::channel();
        (tx, QueuedIntents { rx, control })
    }
}

impl IntentProvider for QueuedIntents {
    fn plan(&mut self, _ctx: &IntentContext) -> Option<Gesture> {
        // labels entered before this trial belong to no trial
        while self.rx.try_recv().is_ok() {}
        self.control.set_awaiting_intent(true);
        None
    }

    fn intent(&mut self, _ctx: &IntentContext) -> Result<Gesture, SessionError> {
        loop {
            match self.rx.recv_timeout(Duration::from_millis(50)) {
                Ok(g) => {
                    self.control.set_awaiting_intent(false);
                    return Ok(g);
                }
                Err(RecvTimeoutError::Timeout) => {
                    if self.control.is_aborted() {
                        return Err(SessionError::Aborted);
                    }
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(SessionError::IntentUnavailable(
                        "intent channel closed".into(),
                    ));
                }
            }
        }
    }
}
