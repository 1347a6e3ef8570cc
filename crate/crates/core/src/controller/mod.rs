//! Finite-state Mealy controllers: extraction from a policy, exhaustive
//! closed-loop verification against a bound, and DOT/JSON export.

mod verify;

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameArena, GameState};

pub use verify::{verify, verify_policy, Play, Verdict, VerificationReport};

pub const JSON_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ControllerError {
    #[error("state budget of {budget} controller states exceeded")]
    BudgetExceeded { budget: usize },
    #[error("malformed controller: {0}")]
    Malformed(String),
    #[error("controller does not match the arena: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A system strategy on game states.
pub trait Policy {
    fn action(&self, s: &GameState, x: u32) -> u32;
}

impl<F: Fn(&GameState, u32) -> u32> Policy for F {
    fn action(&self, s: &GameState, x: u32) -> u32 {
        self(s, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub output: u32,
    pub next: usize,
}

/// Memory states are reachable game states; memory `m` on input `x`
/// outputs `transitions[m][x].output` and moves to `transitions[m][x].next`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Controller {
    pub version: u32,
    #[serde(default)]
    pub env_vars: Vec<String>,
    #[serde(default)]
    pub sys_vars: Vec<String>,
    pub env_bits: usize,
    pub sys_bits: usize,
    pub initial: usize,
    pub states: Vec<GameState>,
    pub transitions: Vec<Vec<Transition>>,
}

impl Controller {
    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn with_names(mut self, env: &[String], sys: &[String]) -> Self {
        self.env_vars = env.to_vec();
        self.sys_vars = sys.to_vec();
        self
    }

    /// Output sequence produced for an input sequence.
    pub fn run(&self, inputs: &[u32]) -> Vec<u32> {
        let mut m = self.initial;
        inputs
            .iter()
            .map(|&x| {
                let t = self.transitions[m][x as usize];
                m = t.next;
                t.output
            })
            .collect()
    }

    pub fn check(&self) -> Result<(), ControllerError> {
        let n = self.states.len();
        let nx = 1usize << self.env_bits;
        if n == 0 || self.initial >= n {
            return Err(ControllerError::Malformed("initial state out of range".into()));
        }
        if self.transitions.len() != n {
            return Err(ControllerError::Malformed(format!(
                "{} transition rows for {n} states",
                self.transitions.len()
            )));
        }
        for (m, row) in self.transitions.iter().enumerate() {
            if row.len() != nx {
                return Err(ControllerError::Malformed(format!("state {m} has {} of {nx} inputs", row.len())));
            }
            for t in row {
                if t.next >= n {
                    return Err(ControllerError::Malformed(format!("state {m} targets {}", t.next)));
                }
                if (t.output as u64) >> self.sys_bits != 0 {
                    return Err(ControllerError::Malformed(format!("state {m} outputs {}", t.output)));
                }
            }
        }
        Ok(())
    }

    /// Equivalent machine with the fewest memory states (partition
    /// refinement on outputs and successor classes). Each merged state keeps
    /// the game-state label of its first member.
    pub fn minimized(&self) -> Controller {
        let n = self.states.len();
        let mut class = vec![0usize; n];
        let mut count = 0;
        loop {
            let mut ids: HashMap<(usize, Vec<(u32, usize)>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|m| {
                    let sig = self.transitions[m].iter().map(|t| (t.output, class[t.next])).collect();
                    let fresh = ids.len();
                    *ids.entry((class[m], sig)).or_insert(fresh)
                })
                .collect();
            class = next;
            if ids.len() == count {
                break;
            }
            count = ids.len();
        }
        // Renumber classes breadth-first from the initial state.
        let mut order = vec![usize::MAX; count];
        let mut reps = vec![self.initial];
        order[class[self.initial]] = 0;
        let mut i = 0;
        while i < reps.len() {
            for t in &self.transitions[reps[i]] {
                let c = class[t.next];
                if order[c] == usize::MAX {
                    order[c] = reps.len();
                    reps.push(t.next);
                }
            }
            i += 1;
        }
        let transitions = reps
            .iter()
            .map(|&m| {
                self.transitions[m]
                    .iter()
                    .map(|t| Transition { output: t.output, next: order[class[t.next]] })
                    .collect()
            })
            .collect();
        Controller {
            initial: 0,
            states: reps.iter().map(|&m| self.states[m].clone()).collect(),
            transitions,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("controller serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ControllerError> {
        let c: Controller = serde_json::from_str(text)?;
        if c.version != JSON_VERSION {
            return Err(ControllerError::Malformed(format!("unsupported version {}", c.version)));
        }
        c.check()?;
        Ok(c)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph controller {\n  rankdir=LR;\n  init [shape=point];\n");
        let _ = writeln!(out, "  init -> m{};", self.initial);
        for (m, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "  m{m} [label=\"m{m}\\n{s}\"];");
        }
        for (m, row) in self.transitions.iter().enumerate() {
            for (x, t) in row.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  m{m} -> m{} [label=\"{} / {}\"];",
                    t.next,
                    bits(x as u32, self.env_bits),
                    bits(t.output, self.sys_bits)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Variable 0 first; `-` for an empty alphabet.
fn bits(v: u32, n: usize) -> String {
    if n == 0 {
        return "-".into();
    }
    (0..n).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Breadth-first unfolding of `policy` from `s1` under `T`.
pub fn extract(arena: &GameArena, policy: &impl Policy, budget: usize) -> Result<Controller, ControllerError> {
    let nx = arena.env_action_count();
    let s1 = arena.initial_state();
    let mut states = vec![s1.clone()];
    let mut index = HashMap::from([(s1, 0usize)]);
    let mut transitions: Vec<Vec<Transition>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(m) = queue.pop_front() {
        let s = states[m].clone();
        let mut row = Vec::with_capacity(nx as usize);
        for x in 0..nx {
            let y = policy.action(&s, x);
            let t = arena.step(&s, x, y);
            let next = match index.get(&t) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    if j >= budget {
                        return Err(ControllerError::BudgetExceeded { budget });
                    }
                    index.insert(t.clone(), j);
                    states.push(t);
                    queue.push_back(j);
                    j
                }
            };
            row.push(Transition { output: y, next });
        }
        if transitions.len() <= m {
            transitions.resize(m + 1, Vec::new());
        }
        transitions[m] = row;
    }
    Ok(Controller {
        version: JSON_VERSION,
        env_vars: Vec::new(),
        sys_vars: Vec::new(),
        env_bits: arena.env_bits(),
        sys_bits: arena.sys_bits(),
        initial: 0,
        states,
        transitions,
    })
}

#[cfg(test)]
mod tests;
