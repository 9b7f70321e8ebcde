use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliResult, RuntimeContext};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    /// False for files holding wall-clock timings.
    pub deterministic: bool,
}

/// Record of one command invocation and everything it wrote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: Option<PathBuf>,
    pub config_sha256: Option<String>,
    pub seed: u64,
    pub out: PathBuf,
    pub artifacts: Vec<Artifact>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Collects the files a command writes under one output directory.
pub struct Outputs {
    root: PathBuf,
    written: Vec<(PathBuf, bool)>,
}

impl Outputs {
    pub fn new(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).runtime()?;
        Ok(Outputs { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `bytes` to `rel`, creating parent directories.
    pub fn write(&mut self, rel: impl AsRef<Path>, bytes: impl AsRef<[u8]>) -> CliResult<PathBuf> {
        self.put(rel.as_ref(), bytes.as_ref(), true)
    }

    /// Like [`Outputs::write`] for files whose content includes timings.
    pub fn write_timed(&mut self, rel: impl AsRef<Path>, bytes: impl AsRef<[u8]>) -> CliResult<PathBuf> {
        self.put(rel.as_ref(), bytes.as_ref(), false)
    }

    fn put(&mut self, rel: &Path, bytes: &[u8], deterministic: bool) -> CliResult<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).runtime()?;
        }
        fs::write(&path, bytes).map_err(|e| format!("{}: {e}", path.display())).runtime()?;
        self.written.retain(|(p, _)| p != rel);
        self.written.push((rel.to_path_buf(), deterministic));
        Ok(path)
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(mut self, command: &str, config: Option<&Path>, seed: u64) -> CliResult<RunManifest> {
        self.written.sort();
        let mut artifacts = Vec::with_capacity(self.written.len());
        for (rel, deterministic) in &self.written {
            let bytes = fs::read(self.root.join(rel)).runtime()?;
            artifacts.push(Artifact {
                path: rel.to_string_lossy().replace('\\', "/"),
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
                deterministic: *deterministic,
            });
        }
        let config_sha256 = match config {
            Some(p) => Some(sha256_hex(&fs::read(p).runtime()?)),
            None => None,
        };
        let manifest = RunManifest {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            config: config.map(Path::to_path_buf),
            config_sha256,
            seed,
            out: self.root.clone(),
            artifacts,
        };
        let text = serde_json::to_string_pretty(&manifest).runtime()?;
        fs::write(self.root.join(MANIFEST_FILE), text + "\n").runtime()?;
        Ok(manifest)
    }
}
