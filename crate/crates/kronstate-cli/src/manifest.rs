use std::collections::BTreeMap;
use std::path::Path;

use kronstate::Provenance;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Serialize, Deserialize)]
pub struct GraphInfo {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub definition: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nnz: Option<usize>,
}

/// Record of one run. Timings are the only field that varies between
/// identical invocations.
#[derive(Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub tuple: String,
    pub kron_coeff: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphInfo>,
    pub vectors: Vec<Artifact>,
    #[serde(default)]
    pub extra: Vec<Artifact>,
    pub timings: BTreeMap<String, f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes `text` under `dir` and returns its artifact entry.
pub fn write_artifact(dir: &Path, file: &str, text: &str) -> CliResult<Artifact> {
    std::fs::write(dir.join(file), text)?;
    Ok(Artifact {
        file: file.to_string(),
        sha256: sha256_hex(text.as_bytes()),
        provenance: None,
        nnz: None,
    })
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError {
            code: 2,
            message: e.to_string(),
        })?;
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(|e| CliError {
            code: 2,
            message: format!("bad manifest: {e}"),
        })
    }
}
