//! Staged output directories and content-hashed manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::format::round_sig;

pub const MANIFEST: &str = "manifest.json";
pub const STAGING: &str = ".partial";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: Option<String>,
    /// Latest commit timestamp in the inputs; outputs carry no wall-clock time.
    pub data_through: Option<String>,
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: "spacex".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: None,
            data_through: None,
            files: Vec::new(),
        }
    }

    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Hash of the manifest itself, used to compare whole runs.
    pub fn digest(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }

    /// Files that are missing or whose content no longer matches.
    pub fn verify(&self, dir: &Path) -> (Vec<String>, Vec<String>) {
        let mut missing = Vec::new();
        let mut modified = Vec::new();
        for e in &self.files {
            match fs::read(dir.join(&e.path)) {
                Ok(bytes) if sha256_hex(&bytes) == e.sha256 => {}
                Ok(_) => modified.push(e.path.clone()),
                Err(_) => missing.push(e.path.clone()),
            }
        }
        (missing, modified)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Rounds every float to 12 significant digits for stable serialization.
pub fn rounded(value: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|f| serde_json::Number::from_f64(round_sig(f)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let v = rounded(serde_json::to_value(value).expect("value serializes"));
    let mut s = serde_json::to_string_pretty(&v).expect("json renders");
    s.push('\n');
    s.into_bytes()
}

/// Collects a run's outputs in `<out>/.partial` and moves them into place
/// only when the whole run succeeds.
pub struct Staging {
    out: PathBuf,
    dir: PathBuf,
    files: BTreeMap<String, (String, u64)>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |e| PipelineError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

impl Staging {
    pub fn new(out: &Path) -> Result<Self, PipelineError> {
        let dir = out.join(STAGING);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(io(&dir))?;
        }
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        Ok(Self {
            out: out.to_path_buf(),
            dir,
            files: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<String, PipelineError> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io(parent))?;
        }
        fs::write(&path, bytes).map_err(io(&path))?;
        let sha = sha256_hex(bytes);
        self.files.insert(rel.to_string(), (sha.clone(), bytes.len() as u64));
        Ok(sha)
    }

    pub fn write_csv(
        &mut self,
        rel: &str,
        f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>,
    ) -> Result<String, PipelineError> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| PipelineError::Io {
            path: rel.to_string(),
            message: e.to_string(),
        })?;
        self.write(rel, &buf)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<String, PipelineError> {
        self.write(rel, &to_json_bytes(value))
    }

    /// Moves staged files into the output directory, removes files the
    /// previous manifest listed but this run did not produce, and writes the
    /// new manifest.
    pub fn commit(self, mut manifest: Manifest) -> Result<Manifest, PipelineError> {
        let previous = Manifest::load(&self.out).ok();
        for rel in self.files.keys() {
            let from = self.dir.join(rel);
            let to = self.out.join(rel);
            if let Some(parent) = to.parent() {
                fs::create_dir_all(parent).map_err(io(parent))?;
            }
            fs::rename(&from, &to).map_err(io(&from))?;
        }
        if let Some(prev) = previous {
            for e in prev.files {
                if !self.files.contains_key(&e.path) {
                    let _ = fs::remove_file(self.out.join(&e.path));
                }
            }
        }
        fs::remove_dir_all(&self.dir).map_err(io(&self.dir))?;
        manifest.files = self
            .files
            .into_iter()
            .map(|(path, (sha256, bytes))| ManifestEntry { path, sha256, bytes })
            .collect();
        let path = self.out.join(MANIFEST);
        fs::write(&path, manifest.to_json()).map_err(io(&path))?;
        Ok(manifest)
    }

    /// Leaves the staged files in `.partial` with the error that stopped
    /// the run.
    pub fn abandon(self, error: &PipelineError) {
        let _ = fs::write(self.dir.join("ERROR.txt"), format!("{error}\n"));
    }
}
