//! Experiment harness behind the `fsmcmc` command line tool.
//!
//! A run reads an [`ExperimentConfig`](config::ExperimentConfig), executes
//! one of five experiment kinds and writes `sweep.csv`, `summary.json` and,
//! for Harris verification, one certificate per dimension.

pub mod bundled;
pub mod config;
pub mod experiments;
pub mod output;

use std::fs;
use std::path::Path;

use serde_json::json;

pub use config::{ConfigError, ExperimentConfig};
pub use experiments::{run_experiment, RunOutput, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] fsmcmc::Error),
}

impl HarnessError {
    /// 2 for configuration problems, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io(_) => 3,
            HarnessError::Core(fsmcmc::Error::Io(_)) => 3,
            HarnessError::Core(_) => 2,
        }
    }
}

fn io(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

/// Writes the sweep table, the summary and any certificates under `outdir`.
pub fn write_outputs(cfg: &ExperimentConfig, run: &RunOutput, outdir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(outdir).map_err(|e| io(outdir, e))?;
    let csv_path = outdir.join(&cfg.output.csv);
    fs::write(&csv_path, output::to_csv(&run.rows)).map_err(|e| io(&csv_path, e))?;

    let mut cert_files = Vec::new();
    for (m, cert) in &run.certificates {
        let name = format!("certificate_m{m}.json");
        let path = outdir.join(&name);
        let text = serde_json::to_string_pretty(cert).map_err(|e| io(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| io(&path, e))?;
        cert_files.push(json!({ "m": m, "file": name }));
    }

    let summary = json!({
        "name": cfg.label(),
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "m_list": cfg.m_list,
        "passed": run.passed(),
        "verdicts": run.verdicts,
        "rows": run.rows.len(),
        "certificates": cert_files,
    });
    let path = outdir.join(&cfg.output.summary);
    let text = serde_json::to_string_pretty(&summary).map_err(|e| io(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| io(&path, e))?;
    Ok(())
}
