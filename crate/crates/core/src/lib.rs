//! Bounded LTL synthesis.
//!
//! Specifications are translated to universal co-Büchi automata, bounded
//! synthesis is played as a safety game over co-Büchi index vectors, and the
//! game is solved either exactly (safe-set fixpoint, value iteration) or by
//! a learned Q-function whose greedy policy is extracted into a controller
//! and verified exhaustively.

pub mod automata;
pub mod controller;
pub mod dqs;
pub mod exact;
pub mod game;
pub mod ltl;
pub mod neural;

#[cfg(test)]
mod testkit;

pub use automata::{Nbw, Ucw};
pub use controller::{extract, verify, Controller, Policy, Verdict, VerificationReport};
pub use exact::{solve_fixpoint, value_iteration, ValueTable};
pub use game::{GameArena, GameState};
pub use ltl::{Ltl, Specification};
