use std::io::{Read, Write};

use anyhow::Result;
use serde::{Deserialize, Serialize};

/// Bumped whenever the column set changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str =
    "schema,benchmark,config,seed,status,solved,episodes,batch_steps,controller_size,minimized_size,input_size,wall_ms,error";

/// One row per (benchmark, configuration, seed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: u32,
    pub benchmark: String,
    pub config: String,
    pub seed: u64,
    /// `realizable`, `unrealizable`, `solved`, `unknown` or `error`.
    pub status: String,
    pub solved: bool,
    pub episodes: Option<usize>,
    pub batch_steps: Option<usize>,
    pub controller_size: Option<usize>,
    /// Size after merging equivalent memory states.
    pub minimized_size: Option<usize>,
    /// Total automaton states, which is also the network input width.
    pub input_size: usize,
    pub wall_ms: Option<u64>,
    pub error: String,
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Appends rows without a header (for files that already have one).
pub fn append_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<RunRecord>, _>>()?)
}

/// Median of the episode counts of solved runs, if any.
pub fn median_episodes<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> Option<f64> {
    let mut eps: Vec<usize> = records.into_iter().filter(|r| r.solved).filter_map(|r| r.episodes).collect();
    if eps.is_empty() {
        return None;
    }
    eps.sort_unstable();
    let n = eps.len();
    Some(if n % 2 == 1 { eps[n / 2] as f64 } else { (eps[n / 2 - 1] + eps[n / 2]) as f64 / 2.0 })
}

/// Number of solved runs of `config` needing at most `e` episodes, for
/// each `e` in `episodes`.
pub fn cumulative_solved(records: &[RunRecord], config: &str, episodes: &[usize]) -> Vec<usize> {
    episodes
        .iter()
        .map(|&e| {
            records.iter().filter(|r| r.config == config && r.solved && r.episodes.is_some_and(|n| n <= e)).count()
        })
        .collect()
}
