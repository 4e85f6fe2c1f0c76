//! Gesture labels and the canonical class ordering.
//!
//! Every pair index, head row and confusion row in the crate is keyed by the
//! order of [`Gesture::ALL`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Number of gesture classes, `Rest` included.
pub const NUM_CLASSES: usize = 9;

/// Number of one-vs-one class pairs, `C(9, 2)`.
pub const NUM_PAIRS: usize = NUM_CLASSES * (NUM_CLASSES - 1) / 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gesture {
    Up,
    Thumb,
    Right,
    Pinch,
    Down,
    Fist,
    Left,
    Open,
    Rest,
}

impl Gesture {
    /// Canonical class order.
    pub const ALL: [Gesture; NUM_CLASSES] = [
        Gesture::Up,
        Gesture::Thumb,
        Gesture::Right,
        Gesture::Pinch,
        Gesture::Down,
        Gesture::Fist,
        Gesture::Left,
        Gesture::Open,
        Gesture::Rest,
    ];

    /// The eight gestures that move the avatar.
    pub const ACTIVE: [Gesture; 8] = [
        Gesture::Up,
        Gesture::Thumb,
        Gesture::Right,
        Gesture::Pinch,
        Gesture::Down,
        Gesture::Fist,
        Gesture::Left,
        Gesture::Open,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Gesture> {
        Gesture::ALL.get(index).copied()
    }

    pub fn is_active(self) -> bool {
        self != Gesture::Rest
    }

    pub fn name(self) -> &'static str {
        match self {
            Gesture::Up => "Up",
            Gesture::Thumb => "Thumb",
            Gesture::Right => "Right",
            Gesture::Pinch => "Pinch",
            Gesture::Down => "Down",
            Gesture::Fist => "Fist",
            Gesture::Left => "Left",
            Gesture::Open => "Open",
            Gesture::Rest => "Rest",
        }
    }

    /// The gesture whose avatar effect undoes this one.
    pub fn inverse(self) -> Option<Gesture> {
        match self {
            Gesture::Up => Some(Gesture::Down),
            Gesture::Down => Some(Gesture::Up),
            Gesture::Left => Some(Gesture::Right),
            Gesture::Right => Some(Gesture::Left),
            Gesture::Thumb => Some(Gesture::Pinch),
            Gesture::Pinch => Some(Gesture::Thumb),
            Gesture::Open => Some(Gesture::Fist),
            Gesture::Fist => Some(Gesture::Open),
            Gesture::Rest => None,
        }
    }
}

impl fmt::Display for Gesture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown gesture `{0}`")]
pub struct UnknownGesture(pub String);

impl FromStr for Gesture {
    type Err = UnknownGesture;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Gesture::ALL
            .iter()
            .copied()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownGesture(s.to_string()))
    }
}

/// All class pairs `(i, j)` with `i < j`, in lexicographic order.
pub fn class_pairs() -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(NUM_PAIRS);
    for i in 0..NUM_CLASSES {
        for j in (i + 1)..NUM_CLASSES {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Position of the pair `(i, j)` within [`class_pairs`].
pub fn pair_index(i: usize, j: usize) -> Option<usize> {
    if i >= j || j >= NUM_CLASSES {
        return None;
    }
    // rows before i contribute (n-1) + (n-2) + ... + (n-i) pairs
    let before: usize = (0..i).map(|r| NUM_CLASSES - 1 - r).sum();
    Some(before + (j - i - 1))
}
