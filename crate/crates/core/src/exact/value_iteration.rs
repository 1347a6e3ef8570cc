use std::collections::HashMap;

use super::space::{Dynamics, StateSpace};
use super::ExactError;
use crate::controller::Policy;
use crate::game::{GameArena, GameState};

/// Integer Q table over the states reachable under `T` with `idx <= K`.
#[derive(Debug, Clone)]
pub struct ValueTable {
    k: i32,
    nx: usize,
    index: HashMap<GameState, usize>,
    q: Vec<i32>,
}

impl ValueTable {
    pub fn bound(&self) -> i32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// `Q(s, x)`. States outside the table count as `K` when `idx(s) >= K`
    /// and as the initial value `-1` otherwise.
    pub fn q(&self, s: &GameState, x: u32) -> i32 {
        match self.index.get(s) {
            Some(&i) => self.q[i * self.nx + x as usize],
            None if s.idx() >= self.k => self.k,
            None => -1,
        }
    }

    /// `V(s) = max_x Q(s, x)`.
    pub fn v(&self, s: &GameState) -> i32 {
        (0..self.nx as u32).map(|x| self.q(s, x)).max().unwrap_or(-1)
    }

    pub fn env_action_count(&self) -> u32 {
        self.nx as u32
    }

    pub fn contains(&self, s: &GameState) -> bool {
        self.index.contains_key(s)
    }

    pub fn states(&self) -> impl Iterator<Item = &GameState> {
        self.index.keys()
    }
}

/// `min(K, max(idx(s), min_y max_x' Q(T(s,x,y), x')))`.
pub fn bellman_backup(arena: &GameArena, table: &ValueTable, s: &GameState, x: u32) -> i32 {
    let k = table.k;
    if s.idx() >= k {
        return k;
    }
    let best = (0..arena.sys_action_count()).map(|y| table.v(&arena.step(s, x, y))).min().unwrap_or(k);
    best.max(s.idx()).min(k)
}

/// In-place Gauss-Seidel sweeps over a breadth-first ordering.
pub struct ValueIteration {
    space: StateSpace,
    k: i32,
    q: Vec<i32>,
    sweeps: usize,
}

impl ValueIteration {
    pub fn new(arena: &GameArena, k: usize, budget: usize) -> Result<Self, ExactError> {
        let k = k as i32;
        let space = StateSpace::explore(arena, Dynamics::Unclamped { bound: k }, budget)?;
        let q = vec![-1; space.len() * space.nx];
        Ok(ValueIteration { space, k, q, sweeps: 0 })
    }

    pub fn q_values(&self) -> &[i32] {
        &self.q
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Number of `(state, env action)` pairs in the table.
    pub fn pair_count(&self) -> usize {
        self.q.len()
    }

    fn v(&self, s: usize) -> i32 {
        let nx = self.space.nx;
        self.q[s * nx..(s + 1) * nx].iter().copied().max().unwrap_or(-1)
    }

    /// One sweep; returns whether any value changed.
    pub fn sweep(&mut self) -> bool {
        self.sweeps += 1;
        let (nx, ny, k) = (self.space.nx, self.space.ny, self.k);
        let mut changed = false;
        for s in 0..self.space.len() {
            let idx = self.space.states[s].idx();
            for x in 0..nx {
                let new = if self.space.is_leaf(s) {
                    k
                } else {
                    let best = (0..ny).map(|y| self.v(self.space.successor(s, x, y))).min().unwrap_or(k);
                    best.max(idx).min(k)
                };
                let slot = &mut self.q[s * nx + x];
                if *slot != new {
                    *slot = new;
                    changed = true;
                }
            }
        }
        changed
    }

    pub fn run(mut self) -> ValueTable {
        while self.sweep() {}
        self.into_table()
    }

    pub fn into_table(self) -> ValueTable {
        ValueTable { k: self.k, nx: self.space.nx, index: self.space.index, q: self.q }
    }
}

/// Sweeps to convergence with values capped at `K`.
pub fn value_iteration(arena: &GameArena, k: usize, budget: usize) -> Result<ValueTable, ExactError> {
    Ok(ValueIteration::new(arena, k, budget)?.run())
}

/// `argmin_y V(T(s, x, y))`, lowest `y` on ties.
pub struct GreedyPolicy<'a> {
    arena: &'a GameArena,
    table: &'a ValueTable,
}

pub fn greedy_policy<'a>(arena: &'a GameArena, table: &'a ValueTable) -> GreedyPolicy<'a> {
    GreedyPolicy { arena, table }
}

impl Policy for GreedyPolicy<'_> {
    fn action(&self, s: &GameState, x: u32) -> u32 {
        let mut best = (0, i32::MAX);
        for y in 0..self.arena.sys_action_count() {
            let t = self.arena.step(s, x, y);
            let v = if self.table.contains(&t) { self.table.v(&t) } else { self.table.k };
            if v < best.1 {
                best = (y, v);
            }
        }
        best.0
    }
}

impl ValueTable {
    /// Table from explicit rows of `Q(s, ·)`, each of length `2^|X|`.
    pub fn from_rows(k: usize, nx: usize, rows: impl IntoIterator<Item = (GameState, Vec<i32>)>) -> Self {
        let mut index = HashMap::new();
        let mut q = Vec::new();
        for (s, row) in rows {
            assert_eq!(row.len(), nx, "row width");
            let i = index.len();
            if !index.contains_key(&s) && index.insert(s, i).is_none() {
                q.extend(row);
            }
        }
        ValueTable { k: k as i32, nx, index, q }
    }
}
