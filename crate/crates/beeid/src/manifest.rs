//! Run manifests: a sidecar JSON next to every output artifact recording
//! the exact invocation, seed, tool version, and input digests, so any
//! output can be reproduced byte-for-byte with `beeid replay`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Full resolved argument vector (without the program name).
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Input path -> sha256 hex digest.
    pub inputs: BTreeMap<String, String>,
    /// Paths this run wrote (relative to the invocation directory).
    pub outputs: Vec<String>,
}

#[derive(Debug)]
pub enum ManifestError {
    Io(std::io::Error),
    Json(serde_json::Error),
    DigestMismatch { path: String, expected: String, actual: String },
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifestError::Io(e) => write!(f, "{e}"),
            ManifestError::Json(e) => write!(f, "{e}"),
            ManifestError::DigestMismatch { path, expected, actual } => write!(
                f,
                "input {path} changed since the manifest was written (sha256 {actual}, manifest says {expected})"
            ),
        }
    }
}

impl std::error::Error for ManifestError {}

impl From<std::io::Error> for ManifestError {
    fn from(e: std::io::Error) -> Self {
        ManifestError::Io(e)
    }
}

impl From<serde_json::Error> for ManifestError {
    fn from(e: serde_json::Error) -> Self {
        ManifestError::Json(e)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<String, ManifestError> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Sidecar path for an output artifact: `<out>.manifest.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

impl RunManifest {
    pub fn new(subcommand: &str, args: &[String], seed: Option<u64>) -> Self {
        RunManifest {
            tool: "beeid".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            args: args.to_vec(),
            seed,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<(), ManifestError> {
        let digest = digest_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Writes the sidecar next to `out`.
    pub fn write_beside(&self, out: &Path) -> Result<PathBuf, ManifestError> {
        let path = sidecar_path(out);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Confirms every recorded input still hashes to its manifest digest.
    pub fn verify_inputs(&self) -> Result<(), ManifestError> {
        for (path, expected) in &self.inputs {
            let actual = digest_file(Path::new(path))?;
            if &actual != expected {
                return Err(ManifestError::DigestMismatch {
                    path: path.clone(),
                    expected: expected.clone(),
                    actual,
                });
            }
        }
        Ok(())
    }
}
