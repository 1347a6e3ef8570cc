//! The bounded-synthesis safety game over co-Büchi index vectors.
//!
//! A game state keeps, for every automaton state, the largest number of
//! rejecting visits among the runs ending there (`-1` when no run ends
//! there). Several automata (one per conjunct) are tracked side by side,
//! each in its own segment of the vector.

mod state;

use std::sync::Arc;

use thiserror::Error;

pub use state::GameState;

use crate::automata::{ltl_to_ucw, reject_distances, Ucw};
use crate::ltl::{Letter, Specification};

/// Upper bound on `|X|` and on `|Y|`.
pub const MAX_ACTION_BITS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("too many {which} variables: {count} (at most {MAX_ACTION_BITS})")]
    TooManyActions { which: &'static str, count: usize },
    #[error("arena needs at least one automaton")]
    NoAutomata,
    #[error("automaton {index} is over {found} propositions, expected {expected}")]
    AlphabetMismatch { index: usize, found: usize, expected: usize },
    #[error(transparent)]
    Automata(#[from] crate::automata::AutomataError),
}

/// Enabled (source, target) pairs per letter, global state indices.
enum Transitions {
    Table(Vec<Vec<(u32, u32)>>),
    OnTheFly,
}

struct Shared {
    automata: Vec<Ucw>,
    offsets: Vec<usize>,
    total: usize,
    env_bits: usize,
    sys_bits: usize,
    rejecting: Vec<bool>,
    inv_distance: Vec<f64>,
    transitions: Transitions,
}

/// The game `G_k` built from one or more UCWs over a shared alphabet.
#[derive(Clone)]
pub struct GameArena {
    shared: Arc<Shared>,
    k: i16,
}

impl std::fmt::Debug for GameArena {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameArena")
            .field("automata", &self.shared.automata.len())
            .field("total_states", &self.shared.total)
            .field("env_bits", &self.shared.env_bits)
            .field("sys_bits", &self.shared.sys_bits)
            .field("k", &self.k)
            .finish()
    }
}

const TABLE_LIMIT: usize = 1 << 24;

impl GameArena {
    pub fn new(automata: Vec<Ucw>, env_bits: usize, sys_bits: usize, k: usize) -> Result<Self, GameError> {
        if env_bits > MAX_ACTION_BITS {
            return Err(GameError::TooManyActions { which: "environment", count: env_bits });
        }
        if sys_bits > MAX_ACTION_BITS {
            return Err(GameError::TooManyActions { which: "system", count: sys_bits });
        }
        if automata.is_empty() {
            return Err(GameError::NoAutomata);
        }
        for (i, a) in automata.iter().enumerate() {
            if a.graph.aps.len() != env_bits + sys_bits {
                return Err(GameError::AlphabetMismatch {
                    index: i,
                    found: a.graph.aps.len(),
                    expected: env_bits + sys_bits,
                });
            }
        }
        let mut offsets = Vec::with_capacity(automata.len());
        let mut total = 0;
        let mut rejecting = Vec::new();
        let mut inv_distance = Vec::new();
        for a in &automata {
            offsets.push(total);
            total += a.state_count();
            rejecting.extend_from_slice(&a.rejecting);
            let d = reject_distances(a);
            inv_distance.extend((0..a.state_count()).map(|q| d.inverse(q)));
        }

        let letters = 1usize << (env_bits + sys_bits);
        let edge_count: usize = automata.iter().map(|a| a.graph.edges.iter().map(Vec::len).sum::<usize>()).sum();
        let transitions = if letters.saturating_mul(edge_count.max(1)) <= TABLE_LIMIT {
            Transitions::Table((0..letters as Letter).map(|l| enabled_pairs(&automata, &offsets, l)).collect())
        } else {
            Transitions::OnTheFly
        };

        Ok(GameArena {
            shared: Arc::new(Shared {
                automata,
                offsets,
                total,
                env_bits,
                sys_bits,
                rejecting,
                inv_distance,
                transitions,
            }),
            k: k.min(i16::MAX as usize) as i16,
        })
    }

    /// Translates the specification (optionally conjunct by conjunct) and
    /// builds the arena.
    pub fn from_spec(spec: &Specification, decompose: bool, k: usize, cap: usize) -> Result<Self, GameError> {
        let names = spec.var_names();
        let parts = if decompose { spec.formula.decompose() } else { vec![spec.formula.clone()] };
        let automata = parts.iter().map(|f| ltl_to_ucw(f, &names, cap)).collect::<Result<Vec<_>, _>>()?;
        GameArena::new(automata, spec.env_count(), spec.sys_count(), k)
    }

    /// Same automata, different bound.
    pub fn with_bound(&self, k: usize) -> GameArena {
        GameArena { shared: Arc::clone(&self.shared), k: k.min(i16::MAX as usize) as i16 }
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn automata(&self) -> &[Ucw] {
        &self.shared.automata
    }

    pub fn total_states(&self) -> usize {
        self.shared.total
    }

    pub fn env_bits(&self) -> usize {
        self.shared.env_bits
    }

    pub fn sys_bits(&self) -> usize {
        self.shared.sys_bits
    }

    pub fn env_action_count(&self) -> u32 {
        1 << self.shared.env_bits
    }

    pub fn sys_action_count(&self) -> u32 {
        1 << self.shared.sys_bits
    }

    pub fn letter(&self, x: u32, y: u32) -> Letter {
        x | (y << self.shared.env_bits)
    }

    /// `⟨0, -1, …, -1⟩` per automaton segment, 0 at its initial state.
    pub fn initial_state(&self) -> GameState {
        let mut v = vec![-1i16; self.shared.total];
        for (a, &off) in self.shared.automata.iter().zip(&self.shared.offsets) {
            v[off + a.graph.initial] = 0;
        }
        GameState::new(v)
    }

    /// Unclamped transition `T(s, x, y)`.
    pub fn step(&self, s: &GameState, x: u32, y: u32) -> GameState {
        GameState::new(self.step_raw(s, x, y))
    }

    /// Clamped transition `T_k(s, x, y)`.
    pub fn step_clamped(&self, s: &GameState, x: u32, y: u32) -> GameState {
        let k = self.k;
        let mut v = self.step_raw(s, x, y);
        for e in &mut v {
            *e = (*e).min(k);
        }
        GameState::new(v)
    }

    fn step_raw(&self, s: &GameState, x: u32, y: u32) -> Vec<i16> {
        debug_assert!(x < self.env_action_count() && y < self.sys_action_count());
        let sh = &*self.shared;
        let letter = self.letter(x, y);
        let src = s.entries();
        let mut t = vec![-1i16; sh.total];
        if !s.is_dead() {
            let mut relax = |from: usize, to: usize| {
                if src[from] > t[to] {
                    t[to] = src[from];
                }
            };
            match &sh.transitions {
                Transitions::Table(table) => {
                    for &(from, to) in &table[letter as usize] {
                        relax(from as usize, to as usize);
                    }
                }
                Transitions::OnTheFly => {
                    for (from, to) in enabled_pairs(&sh.automata, &sh.offsets, letter) {
                        relax(from as usize, to as usize);
                    }
                }
            }
        }
        for (e, &rej) in t.iter_mut().zip(&sh.rejecting) {
            if rej && *e > -1 {
                *e = e.saturating_add(1);
            }
        }
        t
    }

    /// `idx(s) = k`.
    pub fn is_losing(&self, s: &GameState) -> bool {
        s.idx() >= self.k as i32
    }

    /// Potential `Φ(s)`: 0 on the all-dead state, otherwise the largest
    /// `1 / (d(q_i) + 1)` among the entries attaining `idx(s)`.
    pub fn potential(&self, s: &GameState) -> f64 {
        if s.is_dead() {
            return 0.0;
        }
        let idx = s.idx() as i16;
        s.entries()
            .iter()
            .zip(&self.shared.inv_distance)
            .filter(|(&e, _)| e == idx)
            .map(|(_, &inv)| inv)
            .fold(0.0, f64::max)
    }

    /// All system responses to `x`, ascending in `y`, with their successors.
    pub fn enabled_successors(&self, s: &GameState, x: u32, clamped: bool) -> Vec<(u32, GameState)> {
        (0..self.sys_action_count())
            .map(|y| {
                let next = if clamped { self.step_clamped(s, x, y) } else { self.step(s, x, y) };
                (y, next)
            })
            .collect()
    }

    /// The automaton each state index belongs to, and its local index.
    pub fn locate(&self, i: usize) -> (usize, usize) {
        let sh = &*self.shared;
        let a = sh.offsets.partition_point(|&o| o <= i) - 1;
        (a, i - sh.offsets[a])
    }

    /// Graphviz rendering of the states reachable under `T_k`, up to
    /// `limit` states.
    pub fn reachable_dot(&self, limit: usize) -> String {
        use std::collections::{HashMap, VecDeque};
        use std::fmt::Write as _;
        let mut ids: HashMap<GameState, usize> = HashMap::new();
        let mut order = vec![self.initial_state()];
        ids.insert(order[0].clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        let mut out = String::from("digraph game {\n  rankdir=LR;\n");
        while let Some(i) = queue.pop_front() {
            let s = order[i].clone();
            let shape = if self.is_losing(&s) { "box" } else { "ellipse" };
            let _ = writeln!(out, "  {i} [label=\"{s}\", shape={shape}];");
            if self.is_losing(&s) {
                continue;
            }
            for x in 0..self.env_action_count() {
                for y in 0..self.sys_action_count() {
                    let t = self.step_clamped(&s, x, y);
                    let j = match ids.get(&t) {
                        Some(&j) => j,
                        None if order.len() < limit => {
                            let j = order.len();
                            ids.insert(t.clone(), j);
                            order.push(t);
                            queue.push_back(j);
                            j
                        }
                        None => continue,
                    };
                    let _ = writeln!(out, "  {i} -> {j} [label=\"{x}/{y}\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn enabled_pairs(automata: &[Ucw], offsets: &[usize], letter: Letter) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for (a, &off) in automata.iter().zip(offsets) {
        for (q, es) in a.graph.edges.iter().enumerate() {
            for e in es {
                if e.guard.holds(letter) {
                    out.push(((off + q) as u32, (off + e.dst) as u32));
                }
            }
        }
    }
    out
}
