//! Avatar-matching minigame.
//!
//! The avatar is a die on a `cols × rows` board with a face value and a size
//! level. Each active gesture nudges exactly one of the four axes by one
//! step; moves that would leave the allowed range are consumed without
//! effect.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::Outcome;
use crate::gesture::Gesture;

/// Moves separating start and target in every generated game.
pub const GAME_DISTANCE: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no game pair at distance {0} fits the grid")]
    Unsatisfiable(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub cols: i32,
    pub rows: i32,
    pub face_min: i32,
    pub face_max: i32,
    pub size_levels: i32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            cols: 5,
            rows: 5,
            face_min: 1,
            face_max: 6,
            size_levels: 3,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.cols < 1 || self.rows < 1 || self.size_levels < 1 || self.face_max < self.face_min {
            return Err(GameError::InvalidGrid(format!("{self:?}")));
        }
        Ok(())
    }

    /// Inclusive range of each axis, in [`Axis`] order.
    fn bounds(&self) -> [(i32, i32); 4] {
        [
            (0, self.cols - 1),
            (0, self.rows - 1),
            (self.face_min, self.face_max),
            (1, self.size_levels),
        ]
    }

    pub fn contains(&self, a: &Avatar) -> bool {
        self.bounds()
            .iter()
            .zip(a.axes())
            .all(|(&(lo, hi), v)| v >= lo && v <= hi)
    }

    /// Every avatar configuration on this grid.
    pub fn states(&self) -> Vec<Avatar> {
        let mut out = Vec::new();
        for col in 0..self.cols {
            for row in 0..self.rows {
                for face in self.face_min..=self.face_max {
                    for size in 1..=self.size_levels {
                        out.push(Avatar {
                            col,
                            row,
                            face,
                            size,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Avatar {
    pub col: i32,
    /// Row 0 is the top of the board.
    pub row: i32,
    pub face: i32,
    pub size: i32,
}

impl Avatar {
    fn axes(&self) -> [i32; 4] {
        [self.col, self.row, self.face, self.size]
    }

    fn from_axes(v: [i32; 4]) -> Self {
        Avatar {
            col: v[0],
            row: v[1],
            face: v[2],
            size: v[3],
        }
    }

    pub fn distance(&self, other: &Avatar) -> u32 {
        self.axes()
            .iter()
            .zip(other.axes())
            .map(|(a, b)| a.abs_diff(b))
            .sum()
    }
}

/// Axis index and step of an active gesture.
pub fn effect(g: Gesture) -> Option<(usize, i32)> {
    match g {
        Gesture::Right => Some((0, 1)),
        Gesture::Left => Some((0, -1)),
        Gesture::Down => Some((1, 1)),
        Gesture::Up => Some((1, -1)),
        Gesture::Thumb => Some((2, 1)),
        Gesture::Pinch => Some((2, -1)),
        Gesture::Open => Some((3, 1)),
        Gesture::Fist => Some((3, -1)),
        Gesture::Rest => None,
    }
}

fn gesture_for(axis: usize, sign: i32) -> Gesture {
    *Gesture::ACTIVE
        .iter()
        .find(|&&g| effect(g) == Some((axis, sign)))
        .expect("every axis direction has a gesture")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveEffect {
    Applied,
    /// Active gesture at the edge of its range; state unchanged.
    Clamped,
    /// Rest or NoClass.
    Ignored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub grid: GridConfig,
    pub avatar: Avatar,
    pub target: Avatar,
    /// Count of state-changing moves.
    pub moves_made: u32,
}

impl GameState {
    pub fn new(grid: GridConfig, avatar: Avatar, target: Avatar) -> Self {
        GameState {
            grid,
            avatar,
            target,
            moves_made: 0,
        }
    }

    pub fn remaining(&self) -> u32 {
        self.avatar.distance(&self.target)
    }

    pub fn is_complete(&self) -> bool {
        self.avatar == self.target
    }

    /// Gestures that shorten the remaining distance by one.
    pub fn useful_gestures(&self) -> Vec<Gesture> {
        let (a, t) = (self.avatar.axes(), self.target.axes());
        Gesture::ACTIVE
            .iter()
            .copied()
            .filter(|&g| {
                let (axis, step) = effect(g).unwrap();
                (t[axis] - a[axis]).signum() == step
            })
            .collect()
    }

    /// Gesture multiset of any minimal path to the target.
    pub fn minimal_path(&self) -> Vec<Gesture> {
        let (a, t) = (self.avatar.axes(), self.target.axes());
        let mut out = Vec::new();
        for axis in 0..4 {
            let d = t[axis] - a[axis];
            if d == 0 {
                continue;
            }
            out.extend(std::iter::repeat_n(
                gesture_for(axis, d.signum()),
                d.unsigned_abs() as usize,
            ));
        }
        out
    }
}

/// Applies a gesture label to the avatar.
pub fn apply_gesture(state: &GameState, g: Gesture) -> (GameState, MoveEffect) {
    let Some((axis, step)) = effect(g) else {
        return (*state, MoveEffect::Ignored);
    };
    let mut v = state.avatar.axes();
    v[axis] += step;
    let moved = Avatar::from_axes(v);
    if !state.grid.contains(&moved) {
        return (*state, MoveEffect::Clamped);
    }
    let next = GameState {
        avatar: moved,
        moves_made: state.moves_made + 1,
        ..*state
    };
    (next, MoveEffect::Applied)
}

/// [`apply_gesture`] for a thresholded classifier outcome.
pub fn apply_outcome(state: &GameState, outcome: Outcome) -> (GameState, MoveEffect) {
    match outcome {
        Outcome::Label(g) => apply_gesture(state, g),
        Outcome::NoClass => (*state, MoveEffect::Ignored),
    }
}

/// A random start/target pair exactly `distance` moves apart.
pub fn generate_game<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &GridConfig,
    distance: u32,
) -> Result<GameState, GameError> {
    grid.validate()?;
    let mut targets = grid.states();
    targets.shuffle(rng);
    let all = grid.states();
    for target in targets {
        let starts: Vec<&Avatar> = all
            .iter()
            .filter(|s| s.distance(&target) == distance)
            .collect();
        if !starts.is_empty() {
            let start = *starts[rng.random_range(0..starts.len())];
            return Ok(GameState::new(*grid, start, target));
        }
    }
    Err(GameError::Unsatisfiable(distance))
}

/// An instructed game: minimal-path gestures in presentation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructedGame {
    pub state: GameState,
    pub gestures: Vec<Gesture>,
}

/// Displacements with L1 norm `distance` that fit inside the grid.
fn displacements(grid: &GridConfig, distance: i32) -> Vec<[i32; 4]> {
    let span = grid.bounds().map(|(lo, hi)| hi - lo);
    let mut out = Vec::new();
    for dc in -span[0]..=span[0] {
        for dr in -span[1]..=span[1] {
            for df in -span[2]..=span[2] {
                let used = dc.abs() + dr.abs() + df.abs();
                let rest = distance - used;
                if rest < 0 || rest > span[3] {
                    continue;
                }
                for ds in if rest == 0 {
                    vec![0]
                } else {
                    vec![rest, -rest]
                } {
                    out.push([dc, dr, df, ds]);
                }
            }
        }
    }
    out
}

/// Per-gesture demand of a displacement, indexed like [`Gesture::ALL`].
fn demand(d: &[i32; 4]) -> [u32; 9] {
    let mut out = [0u32; 9];
    for (axis, &v) in d.iter().enumerate() {
        if v != 0 {
            out[gesture_for(axis, v.signum()).index()] += v.unsigned_abs();
        }
    }
    out
}

fn pick_balanced<R: Rng + ?Sized>(
    rng: &mut R,
    options: &[[i32; 4]],
    budget: &mut [u32; 9],
    games: usize,
    chosen: &mut Vec<[i32; 4]>,
) -> bool {
    if games == 0 {
        return budget.iter().all(|&b| b == 0);
    }
    let mut order: Vec<usize> = (0..options.len()).collect();
    order.shuffle(rng);
    for i in order {
        let need = demand(&options[i]);
        if need.iter().zip(budget.iter()).any(|(n, b)| n > b) {
            continue;
        }
        budget.iter_mut().zip(&need).for_each(|(b, n)| *b -= n);
        chosen.push(options[i]);
        if pick_balanced(rng, options, budget, games - 1, chosen) {
            return true;
        }
        chosen.pop();
        budget.iter_mut().zip(&need).for_each(|(b, n)| *b += n);
    }
    false
}

/// `games` instructed games whose minimal paths together demand each active
/// gesture equally often.
pub fn generate_balanced_games<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &GridConfig,
    games: usize,
    distance: u32,
) -> Result<Vec<InstructedGame>, GameError> {
    grid.validate()?;
    let total = games as u32 * distance;
    if total % 8 != 0 {
        return Err(GameError::Unsatisfiable(distance));
    }
    let mut budget = [total / 8; 9];
    budget[Gesture::Rest.index()] = 0;
    let options = displacements(grid, distance as i32);
    let mut chosen = Vec::new();
    if !pick_balanced(rng, &options, &mut budget, games, &mut chosen) {
        return Err(GameError::Unsatisfiable(distance));
    }
    let all = grid.states();
    chosen
        .iter()
        .map(|d| {
            let starts: Vec<&Avatar> = all
                .iter()
                .filter(|s| {
                    let mut v = s.axes();
                    v.iter_mut().zip(d).for_each(|(a, b)| *a += b);
                    grid.contains(&Avatar::from_axes(v))
                })
                .collect();
            let start = *starts[rng.random_range(0..starts.len())];
            let mut v = start.axes();
            v.iter_mut().zip(d).for_each(|(a, b)| *a += b);
            let state = GameState::new(*grid, start, Avatar::from_axes(v));
            let mut gestures = state.minimal_path();
            gestures.shuffle(rng);
            Ok(InstructedGame { state, gestures })
        })
        .collect()
}
