use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qsynth_core::automata::{hoa_ap_names, parse_hoa};
use qsynth_core::game::GameArena;
use qsynth_core::ltl::parse_spec;
use qsynth_core::{Specification, Ucw};

/// A synthesis problem: a specification, or co-Büchi automata read from
/// HOA files together with the input/output split.
#[derive(Debug, Clone)]
pub enum Problem {
    Spec { name: String, spec: Specification },
    Automata { name: String, env: Vec<String>, sys: Vec<String>, automata: Vec<Ucw> },
}

impl Problem {
    pub fn from_spec_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec = parse_spec(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(Problem::Spec { name: stem(path), spec })
    }

    /// Automata from HOA files; `inputs` names the environment variables and
    /// every other AP becomes an output, in order of first appearance.
    pub fn from_hoa_files(paths: &[PathBuf], inputs: &[String]) -> Result<Self> {
        if paths.is_empty() {
            bail!("no HOA files given");
        }
        let texts = paths
            .iter()
            .map(|p| fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))
            .collect::<Result<Vec<_>>>()?;
        let mut sys: Vec<String> = Vec::new();
        for (p, t) in paths.iter().zip(&texts) {
            for ap in hoa_ap_names(t).with_context(|| format!("parsing {}", p.display()))? {
                if !inputs.contains(&ap) && !sys.contains(&ap) {
                    sys.push(ap);
                }
            }
        }
        let names: Vec<String> = inputs.iter().chain(&sys).cloned().collect();
        let automata = paths
            .iter()
            .zip(&texts)
            .map(|(p, t)| parse_hoa(t, &names).with_context(|| format!("parsing {}", p.display())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Problem::Automata { name: stem(&paths[0]), env: inputs.to_vec(), sys, automata })
    }

    pub fn name(&self) -> &str {
        match self {
            Problem::Spec { name, .. } | Problem::Automata { name, .. } => name,
        }
    }

    pub fn env_names(&self) -> Vec<String> {
        match self {
            Problem::Spec { spec, .. } => spec.env_names().into_iter().map(String::from).collect(),
            Problem::Automata { env, .. } => env.clone(),
        }
    }

    pub fn sys_names(&self) -> Vec<String> {
        match self {
            Problem::Spec { spec, .. } => spec.sys_names().into_iter().map(String::from).collect(),
            Problem::Automata { sys, .. } => sys.clone(),
        }
    }

    /// Game arena at bound `k`. Decomposition only applies to specifications.
    pub fn arena(&self, decompose: bool, k: usize, cap: usize) -> Result<GameArena> {
        Ok(match self {
            Problem::Spec { spec, .. } => GameArena::from_spec(spec, decompose, k, cap)?,
            Problem::Automata { env, sys, automata, .. } => GameArena::new(automata.clone(), env.len(), sys.len(), k)?,
        })
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "spec".into())
}

/// `.spec` files in `dir`, sorted by name.
pub fn spec_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "spec"))
        .collect();
    files.sort();
    Ok(files)
}
