//! Run manifests: enough to re-run a command and check its outputs.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// Full argument vector, program name first.
    pub argv: Vec<String>,
    /// Working directory the arguments are relative to.
    pub cwd: PathBuf,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub jobs: usize,
    pub started_unix_s: u64,
    pub wall_time_s: f64,
}

/// Collects manifest fields while a command runs.
pub struct Recorder {
    manifest: RunManifest,
    started: Instant,
}

impl Recorder {
    pub fn new(command: &str, argv: &[String]) -> Self {
        let started_unix_s = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            manifest: RunManifest {
                schema_version: MANIFEST_SCHEMA_VERSION,
                tool: env!("CARGO_BIN_NAME").to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.to_string(),
                argv: argv.to_vec(),
                cwd: std::env::current_dir().unwrap_or_default(),
                config: serde_json::Value::Null,
                seed: None,
                inputs: Vec::new(),
                outputs: Vec::new(),
                jobs: rayon::current_num_threads(),
                started_unix_s,
                wall_time_s: 0.0,
            },
            started: Instant::now(),
        }
    }

    pub fn config<T: Serialize>(&mut self, config: &T) -> &mut Self {
        self.manifest.config = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.manifest.seed = Some(seed);
        self
    }

    pub fn input(&mut self, path: impl AsRef<Path>) -> &mut Self {
        self.manifest.inputs.push(path.as_ref().to_path_buf());
        self
    }

    pub fn output(&mut self, path: impl AsRef<Path>) -> &mut Self {
        self.manifest.outputs.push(path.as_ref().to_path_buf());
        self
    }

    pub fn finish(mut self) -> RunManifest {
        self.manifest.wall_time_s = self.started.elapsed().as_secs_f64();
        self.manifest
    }
}

pub fn write(manifest: &RunManifest, path: &Path) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| anyhow::anyhow!("cannot write manifest {}: {e}", path.display()))
}

pub fn read(path: &Path) -> anyhow::Result<RunManifest> {
    let text =
        std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read manifest {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("invalid manifest {}: {e}", path.display()))
}
