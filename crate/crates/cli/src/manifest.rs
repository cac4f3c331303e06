//! run_manifest.json: effective configuration plus input digests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Command;
use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn digests(paths: &[PathBuf]) -> CliResult<Vec<InputDigest>> {
    paths
        .iter()
        .map(|p| Ok(InputDigest { path: p.clone(), sha256: sha256_file(p)? }))
        .collect()
}

impl Manifest {
    pub fn new(command: &Command, inputs: Vec<InputDigest>, outputs: &[String]) -> Self {
        Manifest {
            tool: "tripsim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.clone(),
            inputs,
            outputs: outputs.to_vec(),
        }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let p = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(&p, text).map_err(|e| CliError::io(&p, e))
    }

    /// Fails if any recorded input no longer has its recorded digest.
    pub fn verify_inputs(&self) -> CliResult<()> {
        for input in &self.inputs {
            if sha256_file(&input.path)? != input.sha256 {
                return Err(CliError::DigestMismatch(input.path.clone()));
            }
        }
        Ok(())
    }
}
