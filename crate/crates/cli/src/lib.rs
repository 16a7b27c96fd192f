//! Batch front end: configuration loading, pipelines and reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod fuzz;
pub mod report;

use std::path::Path;

use config::{Job, Overrides};
use error::InputError;
use report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Regularity,
    Metrize,
    Fuzz,
}

/// Loads the job and runs `command`. Returns the report JSON and exit code.
pub fn run(command: Command, config: Option<&Path>, overrides: &Overrides) -> Result<(serde_json::Value, i32), InputError> {
    let job = Job::load(config, overrides, command != Command::Fuzz)?;
    let report: Report = match command {
        Command::Validate => commands::validate(&job)?,
        Command::Regularity => commands::regularity(&job)?,
        Command::Metrize => commands::metrize(&job)?,
        Command::Fuzz => fuzz::fuzz(&job)?,
    };
    Ok((report.to_json(job.strict), report.exit_code(job.strict)))
}
