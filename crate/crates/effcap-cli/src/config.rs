//! Plain-text config files: one `key = value` pair per line, `#` comments,
//! keys mirroring the long flag names. Hyphens and underscores are
//! interchangeable and matching is case-insensitive, so `snr-db`, `snr_db`,
//! and `A` all address the flags they mirror. Explicit flags override
//! config values.

use std::collections::HashMap;
use std::path::Path;

use crate::args::CliError;

#[derive(Debug)]
pub struct Config {
    entries: HashMap<String, String>,
}

/// Canonical key form: lower-case with hyphens.
fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl Config {
    /// An empty config (no file given).
    pub fn empty() -> Self {
        Self {
            entries: HashMap::new(),
        }
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::empty());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::new(5, format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::domain(format!(
                    "config {}:{}: expected key = value, got {raw:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            entries.insert(normalize(key), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    CliError::domain(format!("config key {key}: {v:?} is not a number"))
                })
            })
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>().map_err(|_| {
                    CliError::domain(format!("config key {key}: {v:?} is not an integer"))
                })
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, CliError> {
        self.get(key)
            .map(|v| match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(CliError::domain(format!(
                    "config key {key}: {other:?} is not a boolean"
                ))),
            })
            .transpose()
    }
}

// ---------------------------------------------------------------------
