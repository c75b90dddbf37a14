//! Run manifests: what was asked for, what came out, and how long it took.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cache::{CacheStats, CACHE_VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub version: String,
    pub cache_version: String,
    pub seed: Option<u64>,
    pub stages: Vec<(String, u64)>,
    pub cache: CacheStats,
    pub outputs: Vec<OutputEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub struct Recorder {
    pub manifest: RunManifest,
    stage: Option<(String, Instant)>,
}

impl Recorder {
    pub fn new(command: &str) -> Self {
        Self {
            manifest: RunManifest {
                command: command.to_string(),
                config: BTreeMap::new(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                cache_version: CACHE_VERSION.to_string(),
                seed: None,
                stages: Vec::new(),
                cache: CacheStats::default(),
                outputs: Vec::new(),
            },
            stage: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.manifest.config.insert(key.to_string(), value.to_string());
    }

    /// Close the running stage (if any) and open a new one.
    pub fn stage(&mut self, name: &str) {
        self.finish_stage();
        self.stage = Some((name.to_string(), Instant::now()));
    }

    pub fn finish_stage(&mut self) {
        if let Some((name, t0)) = self.stage.take() {
            self.manifest.stages.push((name, t0.elapsed().as_millis() as u64));
        }
    }

    /// Write `bytes` to `path` and record its digest.
    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> std::io::Result<()> {
        if let Some(d) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(d)?;
        }
        std::fs::write(path, bytes)?;
        self.manifest.outputs.push(OutputEntry {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// `<out>.manifest.json` next to the primary output.
    pub fn manifest_path(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write_manifest(&mut self, out: &Path) -> std::io::Result<()> {
        self.finish_stage();
        let text = serde_json::to_string_pretty(&self.manifest).map_err(std::io::Error::other)?;
        std::fs::write(Self::manifest_path(out), text + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_input() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn outputs_are_listed() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.csv");
        let mut r = Recorder::new("eval");
        r.stage("write");
        r.write(&out, b"a,b\n").unwrap();
        r.write_manifest(&out).unwrap();
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(Recorder::manifest_path(&out)).unwrap()).unwrap();
        assert_eq!(m["outputs"][0]["sha256"], sha256_hex(b"a,b\n"));
        assert_eq!(m["stages"][0][0], "write");
    }
}
