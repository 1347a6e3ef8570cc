use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use super::{Controller, ControllerError, Policy};
use crate::game::{GameArena, GameState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Fail,
    /// The closed loop outgrew the state budget before a verdict.
    Inconclusive,
}

/// A play `s1 x1/y1 s2 ... sn`; `moves[i]` leads from `states[i]` to `states[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Play {
    pub states: Vec<GameState>,
    pub moves: Vec<(u32, u32)>,
}

impl Play {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn last(&self) -> &GameState {
        self.states.last().expect("plays start at s1")
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub visited: usize,
    pub counterexample: Option<Play>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.verdict == Verdict::Ok
    }
}

/// Closed-loop reachability over `(memory, game state)` pairs, recomputing
/// `T` from scratch rather than trusting the stored memory labels.
pub fn verify(
    arena: &GameArena,
    c: &Controller,
    k: usize,
    budget: usize,
) -> Result<VerificationReport, ControllerError> {
    c.check()?;
    if c.env_bits != arena.env_bits() || c.sys_bits != arena.sys_bits() {
        return Err(ControllerError::Mismatch(format!(
            "controller has {}+{} bits, arena {}+{}",
            c.env_bits,
            c.sys_bits,
            arena.env_bits(),
            arena.sys_bits()
        )));
    }
    Ok(explore(
        arena,
        (c.initial, arena.initial_state()),
        |n| &n.1,
        |(m, s), x| {
            let t = c.transitions[*m][x as usize];
            (t.output, (t.next, arena.step(s, x, t.output)))
        },
        k,
        budget,
    ))
}

/// Same check run directly on a policy, with game states as memory.
pub fn verify_policy(arena: &GameArena, policy: &impl Policy, k: usize, budget: usize) -> VerificationReport {
    explore(
        arena,
        arena.initial_state(),
        |s| s,
        |s, x| {
            let y = policy.action(s, x);
            (y, arena.step(s, x, y))
        },
        k,
        budget,
    )
}

fn explore<N: Clone + Eq + Hash>(
    arena: &GameArena,
    start: N,
    state: impl Fn(&N) -> &GameState,
    next: impl Fn(&N, u32) -> (u32, N),
    k: usize,
    budget: usize,
) -> VerificationReport {
    let k = k as i32;
    let mut nodes = vec![start.clone()];
    let mut parent: Vec<Option<(usize, u32, u32)>> = vec![None];
    let mut seen = HashMap::from([(start, 0usize)]);
    let trace = |nodes: &[N], parent: &[Option<(usize, u32, u32)>], mut i: usize| {
        let mut states = vec![state(&nodes[i]).clone()];
        let mut moves = Vec::new();
        while let Some((p, x, y)) = parent[i] {
            states.push(state(&nodes[p]).clone());
            moves.push((x, y));
            i = p;
        }
        states.reverse();
        moves.reverse();
        Play { states, moves }
    };
    if state(&nodes[0]).idx() >= k {
        return VerificationReport {
            verdict: Verdict::Fail,
            visited: 1,
            counterexample: Some(trace(&nodes, &parent, 0)),
        };
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for x in 0..arena.env_action_count() {
            let (y, n) = next(&nodes[i], x);
            if seen.contains_key(&n) {
                continue;
            }
            let j = nodes.len();
            let losing = state(&n).idx() >= k;
            seen.insert(n.clone(), j);
            nodes.push(n);
            parent.push(Some((i, x, y)));
            if losing {
                return VerificationReport {
                    verdict: Verdict::Fail,
                    visited: nodes.len(),
                    counterexample: Some(trace(&nodes, &parent, j)),
                };
            }
            if nodes.len() > budget {
                return VerificationReport {
                    verdict: Verdict::Inconclusive,
                    visited: nodes.len(),
                    counterexample: None,
                };
            }
            queue.push_back(j);
        }
    }
    VerificationReport { verdict: Verdict::Ok, visited: nodes.len(), counterexample: None }
}
