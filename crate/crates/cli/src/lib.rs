//! Experiment runner: parses a configuration, dispatches the sweep on a sized thread pool
//! and persists every table together with a checksummed manifest.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;

use serde_json::Value as Json;

pub use config::{ExperimentConfig, ExperimentKind, Overrides};
pub use error::{CliError, Result};
pub use output::{Format, Table, Value};

use manifest::Collector;

/// Tables produced by a run, in emission order, and the manifest that lists them.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub manifest: Json,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

struct Writer {
    collector: Collector,
    tables: Vec<Table>,
}

impl experiments::Sink for Writer {
    fn emit(&mut self, table: Table) -> Result<()> {
        self.collector.write(&table)?;
        self.tables.push(table);
        Ok(())
    }
}

/// Runs `cfg` on a pool of `cfg.workers` threads.
///
/// On failure the tables already emitted stay on disk and the manifest is written with
/// `complete = false` and the error record.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let started = manifest::now();
    let mut writer = Writer {
        collector: Collector::new(&cfg.out, cfg.format)?,
        tables: vec![],
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Io {
            path: "thread pool".into(),
            message: e.to_string(),
        })?;
    let result = pool.install(|| {
        let sink: &mut dyn experiments::Sink = &mut writer;
        match cfg.kind {
            ExperimentKind::Volumes => experiments::volumes(cfg, sink),
            ExperimentKind::Constants => experiments::constants(cfg, sink),
            ExperimentKind::Ledger => experiments::ledger(cfg, sink),
            ExperimentKind::Solve => experiments::solve(cfg, sink),
            ExperimentKind::Scaling => experiments::scaling(cfg, sink),
            ExperimentKind::Strichartz => experiments::strichartz(cfg, sink),
        }
    });
    let manifest = writer.collector.finish(cfg, &started, result.as_ref().err())?;
    result?;
    Ok(RunOutput {
        tables: writer.tables,
        manifest,
    })
}
