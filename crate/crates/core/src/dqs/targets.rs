use std::cell::RefCell;
use std::collections::HashMap;

use crate::controller::Policy;
use crate::exact::ValueTable;
use crate::game::{GameArena, GameState};
use crate::neural::QNetwork;

/// Anything that yields a Q vector over environment actions.
pub trait QFunction {
    fn q_values(&self, s: &GameState) -> Vec<f64>;

    fn max_q(&self, s: &GameState) -> f64 {
        self.q_values(s).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl QFunction for QNetwork {
    fn q_values(&self, s: &GameState) -> Vec<f64> {
        self.forward(&s.to_input()).expect("network input matches the arena")
    }
}

impl QFunction for ValueTable {
    fn q_values(&self, s: &GameState) -> Vec<f64> {
        (0..self.env_action_count()).map(|x| self.q(s, x) as f64).collect()
    }
}

/// How successor Q values enter the one-step lookahead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookahead {
    /// `round(Q)`, half away from zero.
    Round,
    /// `Φ(s') + floor(Q)`.
    Potential,
}

/// `argmax_x Q(s, x)`, lowest index on ties.
pub fn greedy_env_action(q: &impl QFunction, s: &GameState) -> u32 {
    argmax(&q.q_values(s))
}

pub(crate) fn argmax(v: &[f64]) -> u32 {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best as u32
}

/// `argmin_y max_x' Q(T(s, x, y), x')`, lowest index on ties.
pub fn greedy_sys_action(q: &impl QFunction, arena: &GameArena, s: &GameState, x: u32) -> u32 {
    let mut best = (0, f64::INFINITY);
    for y in 0..arena.sys_action_count() {
        let m = q.max_q(&arena.step(s, x, y));
        if m < best.1 {
            best = (y, m);
        }
    }
    best.0
}

/// One-step lookahead targets, one full vector per state:
/// `min(K, max(idx(s), min_y max_x' g(T(s, x, y), x')))`, or all `-1` for
/// the dead state.
pub fn compute_targets(
    arena: &GameArena,
    q: &impl QFunction,
    states: &[GameState],
    k: usize,
    mode: Lookahead,
) -> Vec<Vec<f64>> {
    let nx = arena.env_action_count();
    let k = k as f64;
    states
        .iter()
        .map(|s| {
            if s.is_dead() {
                return vec![-1.0; nx as usize];
            }
            let idx = s.idx() as f64;
            let mut cache: HashMap<GameState, f64> = HashMap::new();
            (0..nx)
                .map(|x| {
                    let mut best = f64::INFINITY;
                    for y in 0..arena.sys_action_count() {
                        let t = arena.step(s, x, y);
                        let v = *cache.entry(t).or_insert_with_key(|t| lookahead_value(arena, q, t, mode));
                        best = best.min(v);
                    }
                    best.max(idx).min(k)
                })
                .collect()
        })
        .collect()
}

fn lookahead_value(arena: &GameArena, q: &impl QFunction, t: &GameState, mode: Lookahead) -> f64 {
    let values = q.q_values(t);
    match mode {
        Lookahead::Round => values.iter().map(|v| v.round()).fold(f64::NEG_INFINITY, f64::max),
        Lookahead::Potential => {
            let phi = arena.potential(t);
            values.iter().map(|v| phi + v.floor()).fold(f64::NEG_INFINITY, f64::max)
        }
    }
}

/// `Σ_x |Q(s, x) - target(s, x)|`.
pub fn td_error(prediction: &[f64], target: &[f64]) -> f64 {
    prediction.iter().zip(target).map(|(p, t)| (p - t).abs()).sum()
}

/// Greedy system policy of a Q-function, memoizing `max_x' Q` per state.
pub struct GreedySys<'a, Q> {
    arena: &'a GameArena,
    q: &'a Q,
    cache: RefCell<HashMap<GameState, f64>>,
}

impl<'a, Q: QFunction> GreedySys<'a, Q> {
    pub fn new(arena: &'a GameArena, q: &'a Q) -> Self {
        GreedySys { arena, q, cache: RefCell::new(HashMap::new()) }
    }
}

impl<Q: QFunction> Policy for GreedySys<'_, Q> {
    fn action(&self, s: &GameState, x: u32) -> u32 {
        let mut best = (0, f64::INFINITY);
        for y in 0..self.arena.sys_action_count() {
            let t = self.arena.step(s, x, y);
            let cached = self.cache.borrow().get(&t).copied();
            let m = match cached {
                Some(m) => m,
                None => {
                    let m = self.q.max_q(&t);
                    self.cache.borrow_mut().insert(t, m);
                    m
                }
            };
            if m < best.1 {
                best = (y, m);
            }
        }
        best.0
    }
}
