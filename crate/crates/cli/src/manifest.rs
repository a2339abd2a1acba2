use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Record written next to every output: enough to rerun the command and
/// check that it produces the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    pub prng: String,
    pub seed: Option<u64>,
    /// The subcommand's arguments after defaults and environment overrides.
    pub config: serde_json::Value,
    /// sha256 of every file read, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    /// sha256 of every file written, keyed by path as given.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new<C: Serialize>(subcommand: &str, seed: Option<u64>, config: &C) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            prng: imp_core::rng::PRNG_NAME.to_string(),
            seed,
            config: serde_json::to_value(config).expect("arguments serialize"),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs
            .insert(path.display().to_string(), sha256_hex(bytes));
    }

    pub fn output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs
            .insert(path.display().to_string(), sha256_hex(bytes));
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_file(path, text.as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        write!(out, "{b:02x}").expect("writing to a string");
    }
    out
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes)
        .map_err(|e| CliError::input(format!("{}: not UTF-8 ({e})", path.display())))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// `out.json` -> `out.json.manifest.json`.
pub fn default_manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
