//! Flat key=value job configuration: an optional config file plus
//! command-line `key=value` overrides. Reports embed the resolved values,
//! and keys no command consumed are rejected as usage errors.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::CliError;

pub struct JobConfig {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl JobConfig {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {:?}: {}", path, e)))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::Usage(format!(
                        "config line {} is not key=value: {:?}",
                        lineno + 1,
                        line
                    ))
                })?;
                values.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        for item in overrides {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("argument {:?} is not key=value", item))
            })?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(JobConfig {
            values,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.values.get(key).map(String::as_str)
    }

    pub fn str(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| {
                CliError::Usage(format!("cannot parse {}={:?}", key, raw))
            }),
        }
    }

    /// Comma-separated list.
    pub fn list(&self, key: &str, default: &str) -> Vec<String> {
        self.str(key, default)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect()
    }

    pub fn parse_list<T: std::str::FromStr>(&self, key: &str, default: &str) -> Result<Vec<T>, CliError> {
        self.list(key, default)
            .into_iter()
            .map(|s| {
                s.parse()
                    .map_err(|_| CliError::Usage(format!("cannot parse {} item {:?}", key, s)))
            })
            .collect()
    }

    /// A fraction `num/den` (or a bare integer).
    pub fn fraction(&self, key: &str, default: &str) -> Result<(u64, u64), CliError> {
        let raw = self.str(key, default);
        let (num, den) = raw.split_once('/').unwrap_or((raw.as_str(), "1"));
        let parse = |s: &str| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("cannot parse fraction {}={:?}", key, raw)))
        };
        Ok((parse(num)?, parse(den)?))
    }

    /// Rejects keys that no command consumed.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "unknown config keys: {}",
                unknown.join(", ")
            )))
        }
    }

    /// Resolved values, for embedding into reports.
    pub fn lines(&self) -> Vec<String> {
        self.values
            .iter()
            .map(|(k, v)| format!("{} = {}", k, v))
            .collect()
    }
}
