//! Run manifests: config echo, timing and content hashes of every output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub toolkit: String,
    pub version: String,
    pub experiment: String,
    pub config: Value,
    /// Seconds; the only field that differs between identical runs.
    pub wall_time: f64,
    pub summary: Value,
    pub files: Vec<FileEntry>,
}

pub fn hash_file(path: &Path) -> CliResult<FileEntry> {
    let data = std::fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    Ok(FileEntry {
        name: path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        bytes: data.len() as u64,
        sha256: hex::encode(Sha256::digest(&data)),
    })
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join(MANIFEST_NAME);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }

    pub fn read(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text =
            std::fs::read_to_string(&path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Names of listed files whose content no longer matches the recorded hash.
    pub fn stale_files(&self, dir: &Path) -> CliResult<Vec<String>> {
        let mut stale = Vec::new();
        for f in &self.files {
            let path = dir.join(&f.name);
            match hash_file(&path) {
                Ok(now) if now == *f => {}
                Ok(_) => stale.push(f.name.clone()),
                Err(_) => stale.push(format!("{} (missing)", f.name)),
            }
        }
        Ok(stale)
    }
}
