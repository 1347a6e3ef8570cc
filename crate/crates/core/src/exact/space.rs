use std::collections::{HashMap, VecDeque};

use super::ExactError;
use crate::game::{GameArena, GameState};

/// Which transition function drives exploration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dynamics {
    /// `T_k`; losing states are not expanded.
    Clamped,
    /// `T`; states with `idx >= bound` are not expanded.
    Unclamped { bound: i32 },
}

/// Explicit reachable state graph, breadth-first from `s1`.
pub struct StateSpace {
    pub states: Vec<GameState>,
    pub index: HashMap<GameState, usize>,
    /// Successor ids laid out as `[state][x][y]`; empty rows for leaves.
    succ: Vec<Vec<u32>>,
    pub nx: usize,
    pub ny: usize,
}

impl StateSpace {
    pub fn explore(arena: &GameArena, dynamics: Dynamics, budget: usize) -> Result<Self, ExactError> {
        let nx = arena.env_action_count() as usize;
        let ny = arena.sys_action_count() as usize;
        let s1 = arena.initial_state();
        let mut states = vec![s1.clone()];
        let mut index = HashMap::from([(s1, 0usize)]);
        let mut succ: Vec<Vec<u32>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let s = states[i].clone();
            let leaf = match dynamics {
                Dynamics::Clamped => arena.is_losing(&s),
                Dynamics::Unclamped { bound } => s.idx() >= bound,
            };
            if succ.len() <= i {
                succ.resize(i + 1, Vec::new());
            }
            if leaf {
                continue;
            }
            let mut row = Vec::with_capacity(nx * ny);
            for x in 0..nx as u32 {
                for y in 0..ny as u32 {
                    let t = match dynamics {
                        Dynamics::Clamped => arena.step_clamped(&s, x, y),
                        Dynamics::Unclamped { .. } => arena.step(&s, x, y),
                    };
                    let j = match index.get(&t) {
                        Some(&j) => j,
                        None => {
                            let j = states.len();
                            if j >= budget {
                                return Err(ExactError::BudgetExceeded { budget });
                            }
                            index.insert(t.clone(), j);
                            states.push(t);
                            queue.push_back(j);
                            j
                        }
                    };
                    row.push(j as u32);
                }
            }
            succ[i] = row;
        }
        succ.resize(states.len(), Vec::new());
        Ok(StateSpace { states, index, succ, nx, ny })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_leaf(&self, s: usize) -> bool {
        self.succ[s].is_empty()
    }

    pub fn successor(&self, s: usize, x: usize, y: usize) -> usize {
        self.succ[s][x * self.ny + y] as usize
    }

    /// Number of expanded `(state, env action)` pairs.
    pub fn expanded_pairs(&self) -> usize {
        self.succ.iter().filter(|r| !r.is_empty()).count() * self.nx
    }
}
