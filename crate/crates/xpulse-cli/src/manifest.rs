//! Flat `key=value` run manifests.
//!
//! Every subcommand records its fully resolved parameters and the SHA-256
//! digest of each file it wrote.  `xpulse rerun --manifest <file>` replays
//! the run and checks that the fresh outputs are byte-identical.

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Default)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str) -> Manifest {
        let mut manifest = Manifest::default();
        manifest.set("command", command);
        manifest.set("version", env!("CARGO_PKG_VERSION"));
        manifest
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        assert!(
            !key.contains('=') && !key.contains('\n') && !value.contains('\n'),
            "manifest entries must be single-line with '='-free keys"
        );
        self.entries.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).with_context(|| format!("manifest is missing the key {key:?}"))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.require(key)?
            .parse()
            .with_context(|| format!("manifest key {key:?} is not a float"))
    }

    pub fn require_usize(&self, key: &str) -> Result<usize> {
        self.require(key)?
            .parse()
            .with_context(|| format!("manifest key {key:?} is not an integer"))
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| v.parse().with_context(|| format!("manifest key {key:?} is not a float")))
            .transpose()
    }

    pub fn require_bool(&self, key: &str) -> Result<bool> {
        match self.require(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => bail!("manifest key {key:?} must be true or false, got {other:?}"),
        }
    }

    /// Record one produced output file by name and content digest.
    pub fn record_output(&mut self, name: &str, bytes: &[u8]) {
        self.set(&format!("output.{name}.sha256"), sha256_hex(bytes));
    }

    /// `(file name, expected digest)` pairs, sorted by name.
    pub fn outputs(&self) -> Vec<(String, String)> {
        self.entries
            .iter()
            .filter_map(|(key, value)| {
                key.strip_prefix("output.")?
                    .strip_suffix(".sha256")
                    .map(|name| (name.to_string(), value.clone()))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut text = String::new();
        for (key, value) in &self.entries {
            text.push_str(key);
            text.push('=');
            text.push_str(value);
            text.push('\n');
        }
        text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())
            .with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("manifest line {} is not key=value: {line:?}", lineno + 1);
            };
            entries.insert(key.to_string(), value.to_string());
        }
        Ok(Manifest { entries })
    }
}
