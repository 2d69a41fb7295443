//! Merging of command-line flags with an optional JSON config file.
//! Flags win over config values; config values win over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use qftcheck::Channel;
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::UsageError;

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(values)) => Ok(Self { values }),
            Ok(_) => Err(UsageError(format!(
                "config {} is not a JSON object",
                path.display()
            ))),
            Err(e) => Err(UsageError(format!(
                "malformed config {}: {e}",
                path.display()
            ))),
        }
    }

    /// Rejects keys outside `allowed`, so typos do not pass silently.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), UsageError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(UsageError(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, UsageError> {
        self.values
            .get(key)
            .map(|v| {
                serde_json::from_value(v.clone())
                    .map_err(|e| UsageError(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    /// `flag`, else the config value under `key`.
    pub fn pick<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, UsageError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Like [`pick`](Self::pick) for list-valued keys; a scalar config value
    /// counts as a one-element list.
    pub fn pick_list<T: DeserializeOwned>(
        &self,
        flag: Vec<T>,
        key: &str,
    ) -> Result<Option<Vec<T>>, UsageError> {
        if !flag.is_empty() {
            return Ok(Some(flag));
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Array(_)) => self.get(key),
            Some(_) => Ok(self.get::<T>(key)?.map(|v| vec![v])),
        }
    }

    pub fn flag_or(&self, flag: bool, key: &str) -> Result<bool, UsageError> {
        Ok(flag || self.get::<bool>(key)?.unwrap_or(false))
    }

    /// Channel from a `--channel` file, else from the config's `channel`
    /// object.
    pub fn channel(&self, flag: Option<&PathBuf>) -> Result<Option<Channel>, UsageError> {
        if let Some(path) = flag {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read channel {}: {e}", path.display())))?;
            return Channel::from_json(&text).map(Some).map_err(|e| {
                UsageError(format!("invalid channel document {}: {e}", path.display()))
            });
        }
        self.get::<Channel>("channel")
    }
}

pub const COMMON_KEYS: [&str; 6] = ["seed", "out", "format", "threads", "verbose", "no_timing"];

pub fn allowed_keys(specific: &[&'static str]) -> Vec<&'static str> {
    COMMON_KEYS.iter().chain(specific).copied().collect()
}
