//! Experiment runners and command-line plumbing for `fidest`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

pub use config::{Cli, Command, ExperimentConfig, Format, Params};
pub use error::{CliError, CliResult};
pub use table::{Cell, ResultTable};

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

/// Runs the experiment on a pool of `--workers` threads (global pool otherwise).
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    match cfg.params.workers {
        Some(0) => Err(CliError::Config("--workers must be positive".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?
            .install(|| experiments::execute(cfg)),
        None => experiments::execute(cfg),
    }
}

/// Renders a table in the configured format.
pub fn render(table: &ResultTable, cfg: &ExperimentConfig) -> String {
    let stamp = (!cfg.params.deterministic).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    match cfg.format() {
        Format::Csv => table.to_csv(stamp),
        Format::Json => table.to_json(stamp),
    }
}

/// Parse-free entry point used by `main`.
pub fn run_cli(cli: Cli) -> CliResult<()> {
    let cfg = ExperimentConfig::from_cli(cli)?;
    let table = run_experiment(&cfg)?;
    let text = render(&table, &cfg);
    match &cfg.params.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
