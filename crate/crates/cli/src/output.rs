//! Artifact emission. All file writes funnel through one sequential
//! [`RunWriter`] on the main thread; worker parallelism stays inside the
//! library. Every run ends with a `manifest.json` echoing the resolved
//! config, so any run is reproducible from its own manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn wants_csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn wants_json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

pub struct RunWriter {
    out_dir: PathBuf,
    format: Format,
    files: Vec<String>,
    warnings: Vec<String>,
    started: Instant,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    format: Format,
    threads: usize,
    versions: Versions,
    warnings: &'a [String],
    files: &'a [String],
    wall_time_seconds: f64,
}

#[derive(Serialize)]
struct Versions {
    #[serde(rename = "spinbus-cli")]
    cli: &'static str,
    #[serde(rename = "spinbus-core")]
    core: &'static str,
}

impl RunWriter {
    pub fn new(out_dir: &Path, format: Format) -> anyhow::Result<Self> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        Ok(RunWriter {
            out_dir: out_dir.to_path_buf(),
            format,
            files: Vec::new(),
            warnings: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Record a warning: printed immediately, kept for the manifest.
    /// Warnings never change the exit code.
    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, bytes)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Write a CSV artifact if the chosen format includes CSV.
    pub fn csv(&mut self, name: &str, content: &str) -> anyhow::Result<()> {
        if self.format.wants_csv() {
            self.write(name, content.as_bytes())?;
        }
        Ok(())
    }

    /// Write a JSON artifact if the chosen format includes JSON.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        if self.format.wants_json() {
            let mut text = serde_json::to_string_pretty(value)
                .with_context(|| format!("cannot serialize {name}"))?;
            text.push('\n');
            self.write(name, text.as_bytes())?;
        }
        Ok(())
    }

    /// Write a format-independent artifact (e.g. an eigenvector blob).
    pub fn binary(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        self.write(name, bytes)
    }

    /// Write the manifest and close the run. `config` must be the fully
    /// resolved config so the manifest alone reproduces the run.
    pub fn finish<C: Serialize>(
        self,
        command: &str,
        config: &C,
        seed: Option<u64>,
    ) -> anyhow::Result<()> {
        let manifest = Manifest {
            command,
            config: serde_json::to_value(config).context("cannot echo the config")?,
            seed,
            format: self.format,
            threads: rayon::current_num_threads(),
            versions: Versions {
                cli: env!("CARGO_PKG_VERSION"),
                core: spinbus_core::VERSION,
            },
            warnings: &self.warnings,
            files: &self.files,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.out_dir.join("manifest.json");
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}
