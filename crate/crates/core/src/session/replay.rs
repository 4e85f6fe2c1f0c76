//! Event-sourced reconstruction of game states from a trial log.

use super::game::{apply_gesture, apply_outcome, GameState};
use super::record::{LogEntry, SessionEvent};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("trial {trial} of block {block} references game {game} before its initial snapshot")]
    UnknownGame {
        block: u8,
        game: usize,
        trial: usize,
    },
    #[error("snapshot after trial {trial} of block {block} differs from the replayed state")]
    Diverged { block: u8, trial: usize },
    #[error("free-game trial {0} has no decision")]
    MissingDecision(usize),
}

/// Re-applies every logged move to the logged initial states, checking each
/// logged snapshot along the way. Returns the final state of every game in
/// log order.
pub fn replay_games(entries: &[LogEntry]) -> Result<Vec<GameState>, ReplayError> {
    let mut games: Vec<((u8, usize), GameState)> = Vec::new();
    for e in entries {
        match &e.event {
            SessionEvent::GameSnapshot {
                block,
                game,
                trial: None,
                state,
                ..
            } => games.push(((*block, *game), *state)),
            SessionEvent::TrialResult(r) if r.game.is_some() && !r.aborted => {
                let key = (r.block, r.game.unwrap());
                let state = games
                    .iter_mut()
                    .rev()
                    .find(|(k, _)| *k == key)
                    .map(|(_, s)| s)
                    .ok_or(ReplayError::UnknownGame {
                        block: r.block,
                        game: key.1,
                        trial: r.trial,
                    })?;
                *state = if r.block == 2 {
                    // instructed games advance regardless of the decision
                    apply_gesture(state, r.intended).0
                } else {
                    let d = r.decision.ok_or(ReplayError::MissingDecision(r.trial))?;
                    apply_outcome(state, d.outcome).0
                };
            }
            SessionEvent::GameSnapshot {
                block,
                game,
                trial: Some(t),
                state,
                ..
            } => {
                let replayed = games
                    .iter()
                    .rev()
                    .find(|(k, _)| *k == (*block, *game))
                    .map(|(_, s)| s);
                if replayed != Some(state) {
                    return Err(ReplayError::Diverged {
                        block: *block,
                        trial: *t,
                    });
                }
            }
            _ => {}
        }
    }
    Ok(games.into_iter().map(|(_, s)| s).collect())
}
