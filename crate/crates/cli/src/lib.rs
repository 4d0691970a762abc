//! Config-driven experiment runner: parses a TOML experiment file, runs the
//! named experiment on a bounded worker pool and writes CSV tables.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

pub use config::{ExperimentConfig, Overrides};
pub use error::{CliError, FieldError, Result};
pub use output::Table;

/// What a run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub experiment: &'static str,
    pub files: Vec<PathBuf>,
    pub rows: usize,
    pub hash: String,
}

/// Validate, run on `jobs` workers and return the tables without writing them.
pub fn compute(config: &ExperimentConfig) -> Result<Vec<Table>> {
    config.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::field("jobs", e.to_string()))?;
    pool.install(|| config.experiment.run(config.seed))
        .map_err(|source| CliError::Numeric {
            experiment: config.experiment.name().to_string(),
            source,
        })
}

/// Validate, run, and write one CSV per table into the output directory.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    let tables = compute(config)?;
    let files = output::write_tables(&config.out, &tables, &config.metadata(), config.experiment.name())?;
    Ok(RunSummary {
        experiment: config.experiment.name(),
        files,
        rows: tables.iter().map(|t| t.rows.len()).sum(),
        hash: config.hash(),
    })
}
