//! Command-line front end and benchmark harness for `qsynth`.

pub mod cli;
pub mod config;
pub mod problem;
pub mod record;
pub mod run;

pub use cli::{execute, Cli};
pub use config::{Backend, RunConfig};
pub use problem::Problem;
pub use record::RunRecord;
pub use run::{run, Params, Status};
