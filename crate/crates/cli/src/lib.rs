//! Command-line front end: configuration parsing, orchestration and reports.

pub mod config;
pub mod run;

pub use config::{parse_problem_config, ConfigError, RunConfig};
pub use run::{run, Command, Options, Report};
