use std::time::Instant;

use log::{debug, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::replay::ReplayBuffer;
use super::targets::{compute_targets, greedy_env_action, greedy_sys_action, td_error, GreedySys, QFunction};
use super::{DqsConfig, DqsError, RunMetrics};
use crate::controller::{extract, verify, verify_policy, Controller, Verdict as Check};
use crate::game::{GameArena, GameState};
use crate::neural::{train_batch, Adam, QNetwork, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solved,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub controller: Option<Controller>,
    pub metrics: RunMetrics,
}

/// States visited by one episode, `s1` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpisodeTrace {
    pub states: Vec<GameState>,
    pub moves: Vec<(u32, u32)>,
}

/// Network, optimizer, replay buffer and random source of one run.
pub struct Learner<'a> {
    arena: &'a GameArena,
    cfg: DqsConfig,
    pub net: QNetwork,
    pub target: Option<QNetwork>,
    adam: Adam,
    pub buffer: ReplayBuffer,
    rng: ChaCha8Rng,
    pub batch_steps: usize,
    pub exploration_steps: usize,
}

impl<'a> Learner<'a> {
    pub fn new(arena: &'a GameArena, cfg: DqsConfig) -> Result<Self, DqsError> {
        cfg.validate()?;
        let net = QNetwork::new(arena.total_states(), arena.env_action_count() as usize, cfg.seed);
        let target = cfg.use_target_network.then(|| net.clone());
        let adam = Adam::new(net.params().len(), cfg.learning_rate);
        Ok(Learner {
            arena,
            buffer: ReplayBuffer::new(cfg.replay_capacity),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15),
            cfg,
            net,
            target,
            adam,
            batch_steps: 0,
            exploration_steps: 0,
        })
    }

    pub fn config(&self) -> &DqsConfig {
        &self.cfg
    }

    fn lookahead_net(&self) -> &QNetwork {
        self.target.as_ref().unwrap_or(&self.net)
    }

    pub fn targets(&self, states: &[GameState]) -> Vec<Vec<f64>> {
        compute_targets(self.arena, self.lookahead_net(), states, self.cfg.k, self.cfg.lookahead())
    }

    /// TD error of `s` under the current networks.
    pub fn td_error(&self, s: &GameState) -> f64 {
        let target = self.targets(std::slice::from_ref(s)).pop().unwrap();
        td_error(&self.net.q_values(s), &target)
    }

    fn remember(&mut self, s: &GameState) {
        let p = self.td_error(s);
        self.buffer.push(s.clone(), p);
    }

    /// Trains on `extra` plus replay samples filling the batch, then
    /// refreshes the sampled priorities.
    fn batch_step(&mut self, extra: Option<&GameState>) -> Result<f64, DqsError> {
        let want = self.cfg.batch_size - usize::from(extra.is_some());
        let slots = self.buffer.sample(&mut self.rng, want);
        let mut states: Vec<GameState> = slots.iter().map(|&i| self.buffer.state(i).clone()).collect();
        states.extend(extra.cloned());
        if states.is_empty() {
            return Ok(0.0);
        }
        let targets = self.targets(&states);
        let batch: Vec<Sample> =
            states.iter().zip(&targets).map(|(s, t)| Sample { input: s.to_input(), target: t.clone() }).collect();
        let loss = train_batch(&mut self.net, &mut self.adam, &batch, self.cfg.l2)?;
        self.batch_steps += 1;
        for (&slot, (s, t)) in slots.iter().zip(states.iter().zip(&targets)) {
            let p = td_error(&self.net.q_values(s), t);
            self.buffer.update(slot, p);
        }
        Ok(loss)
    }

    /// One episode from `s1` under freshly drawn exploration modes.
    pub fn run_episode(&mut self) -> Result<EpisodeTrace, DqsError> {
        let env_explores = self.rng.random_bool(self.cfg.mu);
        let sys_explores = self.rng.random_bool(self.cfg.mu);
        let mut s = self.arena.initial_state();
        let mut trace = EpisodeTrace { states: vec![s.clone()], moves: Vec::new() };
        self.remember(&s);
        for _ in 0..self.cfg.horizon {
            let x = if env_explores && self.rng.random_bool(self.cfg.epsilon) {
                self.rng.random_range(0..self.arena.env_action_count())
            } else {
                greedy_env_action(&self.net, &s)
            };
            let y = if sys_explores && self.rng.random_bool(self.cfg.epsilon) {
                self.rng.random_range(0..self.arena.sys_action_count())
            } else {
                greedy_sys_action(&self.net, self.arena, &s, x)
            };
            s = self.arena.step(&s, x, y);
            trace.states.push(s.clone());
            trace.moves.push((x, y));
            self.remember(&s);
            self.exploration_steps += 1;
            if self.exploration_steps.is_multiple_of(self.cfg.learn_every) {
                self.batch_step(None)?;
            }
            if s.is_dead() || s.idx() > self.cfg.k as i32 {
                break;
            }
        }
        if let Some(t) = self.target.as_mut() {
            self.net.clone_into(t)?;
        }
        Ok(trace)
    }

    /// `n` batch steps for `ρ = s1 … sn`, the i-th one including `s_{n-i+1}`.
    pub fn learn_from_losing_play(&mut self, play: &[GameState]) -> Result<(), DqsError> {
        for s in play.iter().rev() {
            self.batch_step(Some(s))?;
        }
        Ok(())
    }
}

/// Prefix of an episode up to its first state with `idx >= K`, if any.
fn losing_prefix(trace: &EpisodeTrace, k: usize) -> Option<&[GameState]> {
    let n = trace.states.iter().position(|s| s.idx() >= k as i32)?;
    Some(&trace.states[..=n])
}

/// Runs episodes until the greedy system policy verifies at bound `K` or
/// the episode budget is spent.
pub fn synthesize(arena: &GameArena, cfg: &DqsConfig) -> Result<Outcome, DqsError> {
    let start = Instant::now();
    let mut learner = Learner::new(arena, cfg.clone())?;
    let mut inconclusive = 0;
    let metrics = |l: &Learner, episodes, controller: Option<&Controller>, inconclusive| RunMetrics {
        episodes,
        batch_steps: l.batch_steps,
        exploration_steps: l.exploration_steps,
        solved: controller.is_some(),
        controller_size: controller.map(Controller::size),
        inconclusive_verifications: inconclusive,
        network_inputs: arena.total_states(),
        wall_time: start.elapsed(),
    };
    for episode in 1..=cfg.max_episodes {
        let trace = learner.run_episode()?;
        if cfg.use_losing_replay {
            if let Some(rho) = losing_prefix(&trace, cfg.k) {
                learner.learn_from_losing_play(rho)?;
            }
        }
        let report = verify_policy(arena, &GreedySys::new(arena, &learner.net), cfg.k, cfg.verify_budget);
        match report.verdict {
            Check::Ok => {
                let c = extract(arena, &GreedySys::new(arena, &learner.net), cfg.verify_budget)?;
                let check = verify(arena, &c, cfg.k, cfg.verify_budget)?;
                if check.ok() {
                    debug!("solved after {episode} episodes, {} memory states", c.size());
                    let m = metrics(&learner, episode, Some(&c), inconclusive);
                    return Ok(Outcome { verdict: Verdict::Solved, controller: Some(c), metrics: m });
                }
                warn!("extracted controller failed re-verification; continuing");
            }
            Check::Inconclusive => {
                inconclusive += 1;
                warn!("verification exceeded {} states after episode {episode}", cfg.verify_budget);
            }
            Check::Fail => {
                if cfg.use_losing_replay {
                    let play = report.counterexample.expect("failed verification carries a play");
                    learner.learn_from_losing_play(&play.states)?;
                }
            }
        }
    }
    let m = metrics(&learner, cfg.max_episodes, None, inconclusive);
    Ok(Outcome { verdict: Verdict::Unknown, controller: None, metrics: m })
}
