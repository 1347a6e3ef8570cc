use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use qsynth_core::dqs::DqsConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Fixpoint,
    Vi,
    Dqs,
}

impl FromStr for Backend {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixpoint" => Ok(Backend::Fixpoint),
            "vi" => Ok(Backend::Vi),
            "dqs" => Ok(Backend::Dqs),
            _ => bail!("unknown backend `{s}` (expected fixpoint, vi or dqs)"),
        }
    }
}

/// A named solver configuration: backend, learner toggles, decomposition.
///
/// Names are `fixpoint`, `vi`, or a learner variant such as `DQS`,
/// `DDQS[-]`, `DDQS[-,φ]`; a `dec-` prefix turns on decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunConfig {
    pub backend: Backend,
    pub target_network: bool,
    pub losing_replay: bool,
    pub potentials: bool,
    pub decompose: bool,
}

impl RunConfig {
    pub fn exact(backend: Backend, decompose: bool) -> Self {
        RunConfig { backend, target_network: false, losing_replay: false, potentials: false, decompose }
    }

    pub fn learner(target_network: bool, losing_replay: bool, potentials: bool, decompose: bool) -> Self {
        RunConfig { backend: Backend::Dqs, target_network, losing_replay, potentials, decompose }
    }

    /// Copies the learner toggles into `base`.
    pub fn apply(&self, base: &DqsConfig) -> DqsConfig {
        DqsConfig {
            use_target_network: self.target_network,
            use_losing_replay: self.losing_replay,
            use_potentials: self.potentials,
            ..base.clone()
        }
    }

    /// Every valid configuration, exact backends first.
    pub fn all() -> Vec<RunConfig> {
        let mut out = Vec::new();
        for decompose in [false, true] {
            out.push(RunConfig::exact(Backend::Fixpoint, decompose));
            out.push(RunConfig::exact(Backend::Vi, decompose));
            for bits in 0..8 {
                out.push(RunConfig::learner(bits & 1 != 0, bits & 2 != 0, bits & 4 != 0, decompose));
            }
        }
        out
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.decompose {
            f.write_str("dec-")?;
        }
        match self.backend {
            Backend::Fixpoint => f.write_str("fixpoint"),
            Backend::Vi => f.write_str("vi"),
            Backend::Dqs => f.write_str(&self.apply(&DqsConfig::default()).variant_name()),
        }
    }
}

impl FromStr for RunConfig {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (decompose, rest) = match s.trim().strip_prefix("dec-") {
            Some(rest) => (true, rest),
            None => (false, s.trim()),
        };
        match rest {
            "fixpoint" => return Ok(RunConfig::exact(Backend::Fixpoint, decompose)),
            "vi" => return Ok(RunConfig::exact(Backend::Vi, decompose)),
            _ => {}
        }
        match DqsConfig::default().with_variant(rest) {
            Some(c) => Ok(RunConfig::learner(c.use_target_network, c.use_losing_replay, c.use_potentials, decompose)),
            None => bail!("unknown configuration `{s}`"),
        }
    }
}

/// Splits a comma-separated list of names, ignoring commas inside brackets.
pub fn split_config_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    out.into_iter().map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let all = RunConfig::all();
        let names: std::collections::HashSet<String> = all.iter().map(|c| c.to_string()).collect();
        assert_eq!(names.len(), all.len());
        for c in all {
            assert_eq!(c.to_string().parse::<RunConfig>().unwrap(), c);
        }
    }

    #[test]
    fn variant_names() {
        let c: RunConfig = "DDQS[-,φ]".parse().unwrap();
        assert!(c.target_network && c.losing_replay && c.potentials && !c.decompose);
        let c: RunConfig = "dec-DDQS[-,phi]".parse().unwrap();
        assert!(c.decompose && c.potentials);
        assert_eq!(c.to_string(), "dec-DDQS[-,φ]");
        assert!("DQS[x]".parse::<RunConfig>().is_err());
    }

    #[test]
    fn list_splitting() {
        assert_eq!(split_config_list("DQS[-], DDQS[-,φ],vi"), vec!["DQS[-]", "DDQS[-,φ]", "vi"]);
    }
}
