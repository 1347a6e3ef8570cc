//! Deep Q-learning search over the bounded safety game.
//!
//! Episodes explore the game under ε-greedy policies for both players and
//! fill a prioritized replay buffer; batch steps regress the network on
//! one-step lookahead targets. After every episode the greedy system policy
//! is verified exhaustively, so a returned controller is always correct.

mod learner;
mod replay;
mod targets;

use std::time::Duration;

use thiserror::Error;

use crate::controller::ControllerError;
use crate::game::GameError;
use crate::neural::NeuralError;

pub use learner::{synthesize, EpisodeTrace, Learner, Outcome, Verdict};
pub use replay::ReplayBuffer;
pub use targets::{compute_targets, greedy_env_action, greedy_sys_action, td_error, GreedySys, Lookahead, QFunction};

#[derive(Debug, Error)]
pub enum DqsError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DqsConfig {
    /// Losing bound `K`.
    pub k: usize,
    pub horizon: usize,
    pub max_episodes: usize,
    pub batch_size: usize,
    /// Exploration steps between batch steps.
    pub learn_every: usize,
    /// Probability that a player explores ε-greedily for a whole episode.
    pub mu: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
    pub l2: f64,
    pub replay_capacity: usize,
    pub use_target_network: bool,
    pub use_losing_replay: bool,
    pub use_potentials: bool,
    /// Cap on closed-loop states visited by each verification.
    pub verify_budget: usize,
    pub seed: u64,
}

impl Default for DqsConfig {
    fn default() -> Self {
        DqsConfig {
            k: 4,
            horizon: 50,
            max_episodes: 1000,
            batch_size: 32,
            learn_every: 4,
            mu: 0.2,
            epsilon: 0.2,
            learning_rate: 0.005,
            l2: 1e-4,
            replay_capacity: 10_000,
            use_target_network: false,
            use_losing_replay: false,
            use_potentials: false,
            verify_budget: crate::exact::DEFAULT_STATE_BUDGET,
            seed: 0,
        }
    }
}

impl DqsConfig {
    pub fn validate(&self) -> Result<(), DqsError> {
        let bad = |m: &str| Err(DqsError::Config(m.into()));
        if self.k < 1 {
            return bad("K must be at least 1");
        }
        if self.horizon < 1 {
            return bad("horizon must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.mu) || !(0.0..=1.0).contains(&self.epsilon) {
            return bad("mu and epsilon must lie in [0, 1]");
        }
        if self.batch_size < 1 || self.learn_every < 1 || self.replay_capacity < 1 {
            return bad("batch size, learning period and replay capacity must be positive");
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 || self.l2.is_nan() || self.l2 < 0.0 {
            return bad("learning rate must be positive and l2 non-negative");
        }
        Ok(())
    }

    pub fn lookahead(&self) -> Lookahead {
        if self.use_potentials {
            Lookahead::Potential
        } else {
            Lookahead::Round
        }
    }

    /// Short variant name: `DQS`, `DDQS`, with `[-]` for losing-play
    /// replay and `[-,φ]` when potentials are added.
    pub fn variant_name(&self) -> String {
        let base = if self.use_target_network { "DDQS" } else { "DQS" };
        let mut flags = Vec::new();
        if self.use_losing_replay {
            flags.push("-");
        }
        if self.use_potentials {
            flags.push("φ");
        }
        if flags.is_empty() {
            base.to_string()
        } else {
            format!("{base}[{}]", flags.join(","))
        }
    }

    /// Inverse of [`Self::variant_name`]; `phi` is accepted for `φ`.
    pub fn with_variant(mut self, name: &str) -> Option<Self> {
        let name = name.trim().replace("phi", "φ");
        let (base, flags) = match name.split_once('[') {
            Some((b, rest)) => (b, rest.strip_suffix(']')?),
            None => (name.as_str(), ""),
        };
        self.use_target_network = match base {
            "DQS" => false,
            "DDQS" => true,
            _ => return None,
        };
        self.use_losing_replay = false;
        self.use_potentials = false;
        for f in flags.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match f {
                "-" if !self.use_losing_replay => self.use_losing_replay = true,
                "φ" if !self.use_potentials => self.use_potentials = true,
                _ => return None,
            }
        }
        Some(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub episodes: usize,
    pub batch_steps: usize,
    pub exploration_steps: usize,
    pub solved: bool,
    pub controller_size: Option<usize>,
    /// Verifications that hit the state budget.
    pub inconclusive_verifications: usize,
    pub network_inputs: usize,
    pub wall_time: Duration,
}
