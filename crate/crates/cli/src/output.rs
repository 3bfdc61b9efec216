//! Writing experiment outputs: `report.json`, one CSV per table, and `manifest.json`.
//!
//! Nothing time- or host-dependent is written, so two runs of the same config produce
//! byte-identical directories.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiments::{Check, Outcome, SeedRecord};

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'static str,
    /// The validated configuration, as TOML.
    config: String,
    seeds: &'a SeedRecord,
    passed: bool,
    checks: &'a [Check],
    files: Vec<String>,
}

/// Writes all outputs of `outcome` under `dir` and returns the written paths.
pub fn write_outcome(dir: &Path, cfg: &ExperimentConfig, outcome: &Outcome) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    let write = |files: &mut Vec<PathBuf>, name: &str, contents: &str| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
        Ok(())
    };
    let report = serde_json::json!({
        "experiment": outcome.experiment.name(),
        "passed": outcome.passed(),
        "result": outcome.report,
    });
    write(&mut files, "report.json", &lwc_core::json::to_string(&report)?)?;
    for table in &outcome.tables {
        write(&mut files, &format!("{}.csv", table.name), &table.to_csv())?;
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: outcome.experiment.name(),
        config: cfg.to_toml(),
        seeds: &outcome.seeds,
        passed: outcome.passed(),
        checks: &outcome.checks,
        files: files
            .iter()
            .chain(std::iter::once(&dir.join("manifest.json"))).map(|p| p.file_name().expect("file").to_string_lossy().into_owned()).collect(),
    };
    write(&mut files, "manifest.json", &lwc_core::json::to_string(&manifest)?)?;
    Ok(files)
}
