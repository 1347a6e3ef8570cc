use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use qsynth_core::automata::DEFAULT_STATE_CAP;
use qsynth_core::controller::{verify, Controller, Verdict};
use qsynth_core::dqs::DqsConfig;
use qsynth_core::exact::DEFAULT_STATE_BUDGET;
use rayon::prelude::*;

use crate::config::{split_config_list, Backend, RunConfig};
use crate::problem::{spec_files, Problem};
use crate::record::{append_csv, write_csv, RunRecord};
use crate::run::{error_record, is_budget_error, outcome_record, run, run_record, Params, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNREALIZABLE: i32 = 10;
pub const EXIT_UNKNOWN: i32 = 20;
pub const EXIT_ERROR: i32 = 30;
pub const EXIT_VERIFY_FAILED: i32 = 31;
pub const EXIT_BUDGET: i32 = 32;

#[derive(Parser, Debug)]
#[command(name = "qsynth", version, about = "Bounded LTL synthesis with exact and learned solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one specification (or a set of HOA automata).
    Synth(SynthArgs),
    /// Run every configuration and seed over a directory of specs.
    Bench(BenchArgs),
    /// Re-verify a stored controller against a specification.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Bound k for the exact backends.
    #[arg(long = "k", default_value_t = 4)]
    pub k: usize,
    /// Losing bound K for the learner.
    #[arg(long = "K", default_value_t = 4)]
    pub big_k: usize,
    #[arg(long, default_value_t = 50)]
    pub horizon: usize,
    /// Maximum number of learner episodes.
    #[arg(long, default_value_t = 1000)]
    pub episodes: usize,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long, default_value_t = 0.2)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.005)]
    pub alpha: f64,
    /// Cap on explicitly explored game states.
    #[arg(long, env = "QSYNTH_STATE_BUDGET", default_value_t = DEFAULT_STATE_BUDGET)]
    pub state_budget: usize,
    /// Cap on states per automaton.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub automaton_cap: usize,
}

impl SolverArgs {
    pub fn params(&self) -> Params {
        Params {
            k: self.k,
            dqs: DqsConfig {
                k: self.big_k,
                horizon: self.horizon,
                max_episodes: self.episodes,
                batch_size: self.batch,
                mu: self.mu,
                epsilon: self.eps,
                learning_rate: self.alpha,
                ..DqsConfig::default()
            },
            state_budget: self.state_budget,
            automaton_cap: self.automaton_cap,
        }
    }
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Specification file.
    #[arg(required_unless_present = "hoa")]
    pub spec: Option<PathBuf>,
    /// Co-Büchi automata in HOA format, solved as a product.
    #[arg(long, conflicts_with = "spec")]
    pub hoa: Vec<PathBuf>,
    /// Input variables when reading HOA (comma separated).
    #[arg(long, value_delimiter = ',', requires = "hoa")]
    pub inputs: Vec<String>,
    #[arg(long, default_value = "fixpoint")]
    pub backend: Backend,
    /// Named configuration such as `DDQS[-,φ]`; overrides the toggles.
    #[arg(long)]
    pub config: Option<RunConfig>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub decompose: bool,
    #[arg(long)]
    pub target_net: bool,
    #[arg(long)]
    pub losing_replay: bool,
    #[arg(long)]
    pub potentials: bool,
    /// Directory for controller JSON and DOT files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Append a metrics row to this CSV file.
    #[arg(long)]
    pub metrics_csv: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of `.spec` files.
    pub dir: PathBuf,
    /// Configurations, comma separated or repeated.
    #[arg(long = "configs", default_value = "DQS[-],DDQS,DDQS[-],DDQS[-,φ]")]
    pub configs: Vec<String>,
    /// Number of seeds per cell.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    pub metrics_csv: Option<PathBuf>,
    /// Leave wall_ms empty so reruns produce identical files.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub spec: PathBuf,
    pub controller: PathBuf,
    #[arg(long = "K", default_value_t = 4)]
    pub big_k: usize,
    #[arg(long)]
    pub decompose: bool,
    #[arg(long, env = "QSYNTH_STATE_BUDGET", default_value_t = DEFAULT_STATE_BUDGET)]
    pub state_budget: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub automaton_cap: usize,
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Bench(a) => cmd_bench(&a).map(|_| EXIT_OK),
        Command::Verify(a) => cmd_verify(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_budget_error(&e) {
                EXIT_BUDGET
            } else {
                EXIT_ERROR
            }
        }
    }
}

fn synth_config(a: &SynthArgs) -> RunConfig {
    if let Some(c) = a.config {
        return c;
    }
    match a.backend {
        Backend::Dqs => RunConfig::learner(a.target_net, a.losing_replay, a.potentials, a.decompose),
        b => RunConfig::exact(b, a.decompose),
    }
}

pub fn cmd_synth(a: &SynthArgs) -> Result<i32> {
    let config = synth_config(a);
    let result = synth_problem(a).and_then(|p| run(&p, &config, a.seed, &a.solver.params()).map(|out| (p, out)));
    let (problem, out) = match result {
        Ok(r) => r,
        Err(e) => {
            if let Some(path) = &a.metrics_csv {
                let name = a.spec.as_ref().or(a.hoa.first()).and_then(|p| p.file_stem());
                let name = name.map_or("spec".into(), |n| n.to_string_lossy());
                append_record(path, &error_record(&name, &config, a.seed, format!("{e:#}")))?;
            }
            return Err(e);
        }
    };
    let mut line = format!("{} {} {}", out.status.as_str().to_uppercase(), problem.name(), config);
    if let Some(e) = out.episodes {
        line += &format!(" episodes={e} batch_steps={}", out.batch_steps.unwrap_or(0));
    }
    if let Some(c) = &out.controller {
        line += &format!(" controller_states={}", c.size());
    }
    println!("{line}");

    if let (Some(dir), Some(c)) = (&a.out_dir, &out.controller) {
        write_controller(dir, problem.name(), c)?;
    }
    if let Some(path) = &a.metrics_csv {
        let rec = outcome_record(problem.name(), &config, a.seed, &out, true);
        append_record(path, &rec)?;
    }
    Ok(match out.status {
        Status::Realizable | Status::Solved => EXIT_OK,
        Status::Unrealizable => EXIT_UNREALIZABLE,
        Status::Unknown => EXIT_UNKNOWN,
    })
}

fn synth_problem(a: &SynthArgs) -> Result<Problem> {
    match &a.spec {
        Some(p) => Problem::from_spec_file(p),
        None => Problem::from_hoa_files(&a.hoa, &a.inputs),
    }
}

fn write_controller(dir: &Path, name: &str, c: &Controller) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let json = dir.join(format!("{name}.controller.json"));
    fs::write(&json, c.to_json()).with_context(|| format!("writing {}", json.display()))?;
    let dot = dir.join(format!("{name}.controller.dot"));
    fs::write(&dot, c.to_dot()).with_context(|| format!("writing {}", dot.display()))?;
    info!("wrote {} and {}", json.display(), dot.display());
    Ok(())
}

fn append_record(path: &Path, rec: &RunRecord) -> Result<()> {
    let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        write_csv(file, std::slice::from_ref(rec))
    } else {
        append_csv(file, std::slice::from_ref(rec))
    }
}

/// Full cross product of specs, configurations and seeds, in a fixed order.
pub fn bench(
    specs: &[PathBuf],
    configs: &[RunConfig],
    seeds: &[u64],
    params: &Params,
    jobs: usize,
    timing: bool,
) -> Result<Vec<RunRecord>> {
    let problems: Vec<(PathBuf, Result<Problem, String>)> =
        specs.iter().map(|p| (p.clone(), Problem::from_spec_file(p).map_err(|e| format!("{e:#}")))).collect();
    let mut cells = Vec::new();
    for (pi, _) in problems.iter().enumerate() {
        for (ci, _) in configs.iter().enumerate() {
            for &seed in seeds {
                cells.push((pi, ci, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let records = pool.install(|| {
        cells
            .par_iter()
            .map(|&(pi, ci, seed)| {
                let (path, problem) = &problems[pi];
                let config = &configs[ci];
                match problem {
                    Ok(p) => run_record(p, config, seed, params, timing).0,
                    Err(e) => {
                        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                        error_record(&name, config, seed, e.clone())
                    }
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(records)
}

pub fn cmd_bench(a: &BenchArgs) -> Result<Vec<RunRecord>> {
    let specs = spec_files(&a.dir)?;
    if specs.is_empty() {
        bail!("no .spec files in {}", a.dir.display());
    }
    let configs = a
        .configs
        .iter()
        .flat_map(|c| split_config_list(c))
        .map(|c| c.parse::<RunConfig>())
        .collect::<Result<Vec<_>>>()?;
    let seeds: Vec<u64> = (a.first_seed..a.first_seed + a.seeds).collect();
    let records = bench(&specs, &configs, &seeds, &a.solver.params(), a.jobs, !a.no_timing)?;
    match &a.metrics_csv {
        Some(p) => write_csv(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?, &records)?,
        None => write_csv(io::stdout().lock(), &records)?,
    }
    let mut summary = io::stderr().lock();
    for c in &configs {
        let name = c.to_string();
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.config == name).collect();
        let solved = rows.iter().filter(|r| r.solved).count();
        let median = crate::record::median_episodes(rows.iter().copied());
        writeln!(
            summary,
            "{name}: solved {solved}/{} runs, median episodes {}",
            rows.len(),
            median.map_or("-".into(), |m| m.to_string())
        )?;
    }
    Ok(records)
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let problem = Problem::from_spec_file(&a.spec)?;
    let text = fs::read_to_string(&a.controller).with_context(|| format!("reading {}", a.controller.display()))?;
    let c = Controller::from_json(&text).with_context(|| format!("loading {}", a.controller.display()))?;
    let arena = problem.arena(a.decompose, a.big_k, a.automaton_cap)?;
    let report = verify(&arena, &c, a.big_k, a.state_budget)?;
    match report.verdict {
        Verdict::Ok => {
            println!("OK visited={}", report.visited);
            Ok(EXIT_OK)
        }
        Verdict::Fail => {
            let play = report.counterexample.expect("failing verdicts carry a play");
            println!("FAIL visited={} counterexample_length={}", report.visited, play.len());
            for (s, (x, y)) in play.states.iter().zip(&play.moves) {
                println!("  {s} --{x}/{y}-->");
            }
            println!("  {}", play.last());
            Ok(EXIT_VERIFY_FAILED)
        }
        Verdict::Inconclusive => {
            println!("INCONCLUSIVE visited={} (state budget {})", report.visited, a.state_budget);
            Ok(EXIT_BUDGET)
        }
    }
}
