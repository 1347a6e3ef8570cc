use rand::Rng;

use crate::game::GameState;

/// Fixed-capacity FIFO buffer of game states with a sum tree over their
/// priorities for proportional sampling (with replacement).
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    leaves: usize,
    tree: Vec<f64>,
    states: Vec<GameState>,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "replay capacity must be positive");
        let leaves = capacity.next_power_of_two();
        ReplayBuffer {
            capacity,
            leaves,
            tree: vec![0.0; 2 * leaves],
            states: Vec::with_capacity(capacity.min(1 << 16)),
            next: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn total(&self) -> f64 {
        self.tree[1]
    }

    pub fn state(&self, slot: usize) -> &GameState {
        &self.states[slot]
    }

    pub fn priority(&self, slot: usize) -> f64 {
        self.tree[self.leaves + slot]
    }

    /// Inserts `s`, evicting the oldest entry when full; returns its slot.
    pub fn push(&mut self, s: GameState, priority: f64) -> usize {
        let slot = self.next;
        if slot == self.states.len() {
            self.states.push(s);
        } else {
            self.states[slot] = s;
        }
        self.next = (self.next + 1) % self.capacity;
        self.update(slot, priority);
        slot
    }

    /// Negative or non-finite priorities are stored as zero.
    pub fn update(&mut self, slot: usize, priority: f64) {
        assert!(slot < self.states.len(), "slot {slot} out of range");
        let p = if priority.is_finite() && priority > 0.0 { priority } else { 0.0 };
        let mut i = self.leaves + slot;
        self.tree[i] = p;
        while i > 1 {
            i /= 2;
            self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1];
        }
    }

    /// `n` slots drawn proportionally to priority, or uniformly when every
    /// priority is zero. Empty buffers yield nothing.
    pub fn sample<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<usize> {
        if self.is_empty() {
            return Vec::new();
        }
        let total = self.total();
        (0..n)
            .map(|_| {
                if total <= 0.0 {
                    return rng.random_range(0..self.len());
                }
                let mut u = rng.random::<f64>() * total;
                let mut i = 1;
                while i < self.leaves {
                    let (l, r) = (self.tree[2 * i], self.tree[2 * i + 1]);
                    if (u < l || r <= 0.0) && l > 0.0 {
                        i *= 2;
                    } else {
                        u -= l;
                        i = 2 * i + 1;
                    }
                }
                i - self.leaves
            })
            .collect()
    }
}
