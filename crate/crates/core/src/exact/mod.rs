//! Exact solvers for the bounded safety game: the safe-set fixpoint over
//! `T_k` and integer value iteration over the Bellman equations.

mod fixpoint;
mod space;
mod value_iteration;

use thiserror::Error;

pub use fixpoint::{solve_fixpoint, SafeSetResult};
pub use space::{Dynamics, StateSpace};
pub use value_iteration::{bellman_backup, greedy_policy, value_iteration, GreedyPolicy, ValueIteration, ValueTable};

/// Default bound on explicitly explored game states.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("state budget of {budget} game states exceeded")]
    BudgetExceeded { budget: usize },
}

#[cfg(test)]
mod tests;
