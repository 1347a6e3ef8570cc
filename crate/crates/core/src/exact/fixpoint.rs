use std::collections::HashMap;

use super::space::{Dynamics, StateSpace};
use super::ExactError;
use crate::game::{GameArena, GameState};

/// Greatest safe set of `G_k` and a winning policy on it.
pub struct SafeSetResult {
    pub realizable: bool,
    space: StateSpace,
    safe: Vec<bool>,
    /// `[state][x]`, defined on safe states.
    policy: Vec<Option<u32>>,
}

impl SafeSetResult {
    pub fn is_safe(&self, s: &GameState) -> bool {
        self.space.index.get(s).is_some_and(|&i| self.safe[i])
    }

    pub fn safe_states(&self) -> impl Iterator<Item = &GameState> {
        self.space.states.iter().zip(&self.safe).filter_map(|(s, &ok)| ok.then_some(s))
    }

    pub fn safe_count(&self) -> usize {
        self.safe.iter().filter(|&&b| b).count()
    }

    pub fn explored_count(&self) -> usize {
        self.space.len()
    }

    /// Winning response to `x` in a safe state.
    pub fn action(&self, s: &GameState, x: u32) -> Option<u32> {
        let &i = self.space.index.get(s)?;
        self.policy[i * self.space.nx + x as usize]
    }

    pub fn policy_map(&self) -> HashMap<(GameState, u32), u32> {
        let mut out = HashMap::new();
        for (i, s) in self.space.states.iter().enumerate() {
            for x in 0..self.space.nx {
                if let Some(y) = self.policy[i * self.space.nx + x] {
                    out.insert((s.clone(), x as u32), y);
                }
            }
        }
        out
    }
}

/// Solves `G_k` (bound taken from the arena) by the uncontrollable
/// predecessor fixpoint: a state is unsafe if it is losing, or if some
/// environment move leaves only unsafe successors.
pub fn solve_fixpoint(arena: &GameArena, budget: usize) -> Result<SafeSetResult, ExactError> {
    let space = StateSpace::explore(arena, Dynamics::Clamped, budget)?;
    let (n, nx, ny) = (space.len(), space.nx, space.ny);

    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut good = vec![ny as u32; n * nx];
    for s in 0..n {
        if space.is_leaf(s) {
            continue;
        }
        for x in 0..nx {
            for y in 0..ny {
                preds[space.successor(s, x, y)].push((s * nx + x) as u32);
            }
        }
    }

    let mut bad: Vec<bool> = space.states.iter().map(|s| arena.is_losing(s)).collect();
    let mut work: Vec<usize> = (0..n).filter(|&s| bad[s]).collect();
    while let Some(t) = work.pop() {
        for &p in &preds[t] {
            let p = p as usize;
            good[p] -= 1;
            let s = p / nx;
            if good[p] == 0 && !bad[s] {
                bad[s] = true;
                work.push(s);
            }
        }
    }

    let safe: Vec<bool> = bad.iter().map(|b| !b).collect();
    let mut policy = vec![None; n * nx];
    for s in (0..n).filter(|&s| safe[s]) {
        for x in 0..nx {
            policy[s * nx + x] = (0..ny).find(|&y| safe[space.successor(s, x, y)]).map(|y| y as u32);
        }
    }
    Ok(SafeSetResult { realizable: safe[0], space, safe, policy })
}

impl crate::controller::Policy for SafeSetResult {
    /// Falls back to `y = 0` off the safe set.
    fn action(&self, s: &GameState, x: u32) -> u32 {
        SafeSetResult::action(self, s, x).unwrap_or(0)
    }
}
