use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use hippo_lab_core::complexity::MACHINE_VERSION;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

/// Top-level record of one command run. Everything except `timing_ms` is a
/// function of the config and seeds.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub machine: &'static str,
    pub config: Value,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub pass: bool,
    pub timing_ms: u128,
    #[serde(skip)]
    started: Option<Instant>,
    #[serde(skip)]
    out_dir: PathBuf,
}

impl RunReport {
    pub fn new(command: &str, config: Value, out_dir: &Path) -> Self {
        RunReport {
            command: command.to_string(),
            machine: MACHINE_VERSION,
            config,
            checks: Vec::new(),
            artifacts: Vec::new(),
            pass: true,
            timing_ms: 0,
            started: Some(Instant::now()),
            out_dir: out_dir.to_path_buf(),
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Serialize) {
        self.pass &= pass;
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: serde_json::to_value(detail).expect("report details serialize"),
        });
    }

    /// Write an artifact into the output directory and record its name.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("cannot create {}", self.out_dir.display()))?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        self.artifacts.push(name.to_string());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Write `report.json` and return whether every check passed.
    pub fn finish(mut self) -> Result<bool> {
        self.timing_ms = self.started.map(|s| s.elapsed().as_millis()).unwrap_or(0);
        let pass = self.pass;
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        std::fs::create_dir_all(&self.out_dir)?;
        std::fs::write(self.out_dir.join("report.json"), text)?;
        Ok(pass)
    }
}
