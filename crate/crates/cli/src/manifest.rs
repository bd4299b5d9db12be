//! Run manifests: a sidecar `<output>.manifest.json` next to every artifact
//! recording what produced it.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use riskfuse_core::params::sha256_hex;
use riskfuse_core::ParameterSet;

use crate::error::CliError;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterRef {
    pub name: String,
    pub version: String,
    pub checksums: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub tool_version: String,
    /// SHA-256 of the command's configuration (config file or normalized
    /// arguments).
    pub config_hash: String,
    pub parameters: ParameterRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Input files by path, with their SHA-256.
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
    /// SHA-256 of the artifact this manifest describes.
    pub output_sha256: String,
    pub started: String,
    pub finished: String,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Collects provenance while a command runs.
#[derive(Debug, Clone)]
pub struct ManifestBuilder {
    command: String,
    config_hash: String,
    parameters: ParameterRef,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    started: String,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: &[u8], params: &ParameterSet) -> Self {
        ManifestBuilder {
            command: command.into(),
            config_hash: sha256_hex(config),
            parameters: ParameterRef {
                name: params.manifest.name.clone(),
                version: params.manifest.version.clone(),
                checksums: params.checksums().clone(),
            },
            seed: None,
            inputs: BTreeMap::new(),
            started: now(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs
            .insert(path.display().to_string(), sha256_hex(bytes));
    }

    /// Writes `bytes` to `out` and the manifest beside it.
    pub fn write_artifact(&self, out: &Path, bytes: &[u8]) -> Result<RunManifest, CliError> {
        std::fs::write(out, bytes).map_err(|e| CliError::io(out, e))?;
        let m = RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: self.command.clone(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config_hash: self.config_hash.clone(),
            parameters: self.parameters.clone(),
            seed: self.seed,
            inputs: self.inputs.clone(),
            output_sha256: sha256_hex(bytes),
            started: self.started.clone(),
            finished: now(),
        };
        let side = sidecar_path(out);
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        std::fs::write(&side, text + "\n").map_err(|e| CliError::io(&side, e))?;
        Ok(m)
    }
}
