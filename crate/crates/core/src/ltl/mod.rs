//! LTL syntax, the `.spec` reader, negation normal form and exact
//! evaluation on lasso-shaped words.

mod formula;
mod lasso;
mod parse;

use std::collections::HashMap;

pub use formula::{DisplayLtl, Ltl, VarId};
pub use lasso::{eval_lasso, LassoTrace};
pub use parse::{parse_formula, parse_spec, ParseError};

/// A letter of `2^(X ∪ Y)` as a bit vector. Environment variables occupy
/// the low-order bits in declaration order, system variables follow.
pub type Letter = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Environment,
    System,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proposition {
    pub name: String,
    pub kind: VarKind,
}

/// An LTL specification `⟨X, Y, φ⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specification {
    pub env_vars: Vec<Proposition>,
    pub sys_vars: Vec<Proposition>,
    pub formula: Ltl,
}

impl Specification {
    /// Builds a specification from name lists; `formula` must already use
    /// the env-then-sys index layout.
    pub fn new(env: &[&str], sys: &[&str], formula: Ltl) -> Self {
        let mk = |names: &[&str], kind| names.iter().map(|n| Proposition { name: n.to_string(), kind }).collect();
        Specification { env_vars: mk(env, VarKind::Environment), sys_vars: mk(sys, VarKind::System), formula }
    }

    pub fn env_count(&self) -> usize {
        self.env_vars.len()
    }

    pub fn sys_count(&self) -> usize {
        self.sys_vars.len()
    }

    /// All proposition names in bit order.
    pub fn var_names(&self) -> Vec<String> {
        self.env_vars.iter().chain(&self.sys_vars).map(|p| p.name.clone()).collect()
    }

    pub fn env_names(&self) -> Vec<&str> {
        self.env_vars.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn sys_names(&self) -> Vec<&str> {
        self.sys_vars.iter().map(|p| p.name.as_str()).collect()
    }

    pub(crate) fn name_map(&self) -> HashMap<String, usize> {
        self.var_names().into_iter().enumerate().map(|(i, n)| (n, i)).collect()
    }

    /// Concatenates an environment move and a system move into a letter.
    pub fn letter(&self, env: u32, sys: u32) -> Letter {
        env | (sys << self.env_count())
    }
}
