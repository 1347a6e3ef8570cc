use std::time::Instant;

use anyhow::{bail, Result};
use qsynth_core::automata::DEFAULT_STATE_CAP;
use qsynth_core::controller::ControllerError;
use qsynth_core::controller::{extract, verify, Controller};
use qsynth_core::dqs::{synthesize, DqsConfig, Verdict};
use qsynth_core::exact::{greedy_policy, solve_fixpoint, value_iteration, ExactError, DEFAULT_STATE_BUDGET};

use crate::config::{Backend, RunConfig};
use crate::problem::Problem;
use crate::record::{RunRecord, SCHEMA_VERSION};

/// Solver parameters shared by every configuration.
#[derive(Debug, Clone)]
pub struct Params {
    /// Bound `k` for the exact backends.
    pub k: usize,
    /// Learner settings; its `k` is the learner's losing bound `K`.
    pub dqs: DqsConfig,
    pub state_budget: usize,
    pub automaton_cap: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { k: 4, dqs: DqsConfig::default(), state_budget: DEFAULT_STATE_BUDGET, automaton_cap: DEFAULT_STATE_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Realizable,
    Unrealizable,
    Solved,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Realizable => "realizable",
            Status::Unrealizable => "unrealizable",
            Status::Solved => "solved",
            Status::Unknown => "unknown",
        }
    }

    pub fn solved(self) -> bool {
        matches!(self, Status::Realizable | Status::Solved)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: Status,
    pub controller: Option<Controller>,
    pub episodes: Option<usize>,
    pub batch_steps: Option<usize>,
    pub input_size: usize,
    pub wall_ms: u64,
}

/// True when `e` is a state-budget overflow anywhere in its chain.
pub fn is_budget_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<ExactError>(), Some(ExactError::BudgetExceeded { .. }))
            || matches!(c.downcast_ref::<ControllerError>(), Some(ControllerError::BudgetExceeded { .. }))
    })
}

/// Runs one configuration. Any controller returned has passed exhaustive
/// verification at the relevant bound. Exact backends return minimized
/// controllers; learned ones are returned as extracted.
pub fn run(problem: &Problem, config: &RunConfig, seed: u64, params: &Params) -> Result<RunOutcome> {
    let start = Instant::now();
    let bound = match config.backend {
        Backend::Fixpoint | Backend::Vi => params.k,
        Backend::Dqs => params.dqs.k,
    };
    let arena = problem.arena(config.decompose, bound, params.automaton_cap)?;
    let input_size = arena.total_states();
    let (status, controller, episodes, batch_steps) = match config.backend {
        Backend::Fixpoint => {
            let r = solve_fixpoint(&arena, params.state_budget)?;
            if r.realizable {
                (Status::Realizable, Some(extract(&arena, &r, params.state_budget)?.minimized()), None, None)
            } else {
                (Status::Unrealizable, None, None, None)
            }
        }
        Backend::Vi => {
            let t = value_iteration(&arena, bound, params.state_budget)?;
            if t.v(&arena.initial_state()) < bound as i32 {
                let c = extract(&arena, &greedy_policy(&arena, &t), params.state_budget)?.minimized();
                (Status::Realizable, Some(c), None, None)
            } else {
                (Status::Unrealizable, None, None, None)
            }
        }
        Backend::Dqs => {
            let cfg = DqsConfig { seed, verify_budget: params.state_budget, ..config.apply(&params.dqs) };
            let out = synthesize(&arena, &cfg)?;
            let status = match out.verdict {
                Verdict::Solved => Status::Solved,
                Verdict::Unknown => Status::Unknown,
            };
            (status, out.controller, Some(out.metrics.episodes), Some(out.metrics.batch_steps))
        }
    };
    if let Some(c) = &controller {
        let report = verify(&arena, c, bound, params.state_budget)?;
        if !report.ok() {
            bail!("internal error: {config} produced a controller that fails verification ({:?})", report.verdict);
        }
    }
    let controller = controller.map(|c| c.with_names(&problem.env_names(), &problem.sys_names()));
    Ok(RunOutcome {
        status,
        controller,
        episodes,
        batch_steps,
        input_size,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Row for a run that failed before producing an outcome.
pub fn error_record(benchmark: &str, config: &RunConfig, seed: u64, error: String) -> RunRecord {
    RunRecord {
        schema: SCHEMA_VERSION,
        benchmark: benchmark.to_string(),
        config: config.to_string(),
        seed,
        status: "error".into(),
        solved: false,
        episodes: None,
        batch_steps: None,
        controller_size: None,
        minimized_size: None,
        input_size: 0,
        wall_ms: None,
        error,
    }
}

pub fn outcome_record(benchmark: &str, config: &RunConfig, seed: u64, out: &RunOutcome, timing: bool) -> RunRecord {
    RunRecord {
        status: out.status.as_str().into(),
        solved: out.status.solved(),
        episodes: out.episodes,
        batch_steps: out.batch_steps,
        controller_size: out.controller.as_ref().map(Controller::size),
        minimized_size: out.controller.as_ref().map(|c| c.minimized().size()),
        input_size: out.input_size,
        wall_ms: timing.then_some(out.wall_ms),
        ..error_record(benchmark, config, seed, String::new())
    }
}

/// [`run`] folded into a CSV row; errors become `error` rows.
pub fn run_record(
    problem: &Problem,
    config: &RunConfig,
    seed: u64,
    params: &Params,
    timing: bool,
) -> (RunRecord, Option<Controller>) {
    match run(problem, config, seed, params) {
        Ok(out) => (outcome_record(problem.name(), config, seed, &out, timing), out.controller),
        Err(e) => (error_record(problem.name(), config, seed, format!("{e:#}")), None),
    }
}
