use std::fmt;

use serde::{Deserialize, Serialize};

/// Vector of per-automaton-state co-Büchi indexes. The maximum entry is
/// cached, so the all-dead test is O(1).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<i16>", into = "Vec<i16>")]
pub struct GameState {
    entries: Vec<i16>,
    idx: i16,
}

impl GameState {
    pub fn new(entries: Vec<i16>) -> Self {
        let idx = entries.iter().copied().max().unwrap_or(-1).max(-1);
        GameState { entries, idx }
    }

    pub fn entries(&self) -> &[i16] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest co-Büchi index among the tracked runs; -1 if none.
    pub fn idx(&self) -> i32 {
        self.idx as i32
    }

    /// `⟨-1, …, -1⟩`: every run has died.
    pub fn is_dead(&self) -> bool {
        self.idx < 0
    }

    /// Entries as network input; -1 stays -1.0.
    pub fn to_input(&self) -> Vec<f64> {
        self.entries.iter().map(|&e| e as f64).collect()
    }

    /// Sub-vector for one automaton segment.
    pub fn segment(&self, offset: usize, len: usize) -> &[i16] {
        &self.entries[offset..offset + len]
    }
}

impl From<Vec<i16>> for GameState {
    fn from(v: Vec<i16>) -> Self {
        GameState::new(v)
    }
}

impl From<GameState> for Vec<i16> {
    fn from(s: GameState) -> Self {
        s.entries
    }
}

impl fmt::Debug for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ">")
    }
}
