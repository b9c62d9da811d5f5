//! Flat `key = value` settings file. Command-line flags take precedence over
//! these values, which take precedence over built-in defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

use crate::UsageError;

pub const KEYS: &[&str] = &[
    "annotator",
    "b",
    "depth",
    "form",
    "idf_floor0",
    "k1",
    "multiplicity",
    "num_cand_entities",
    "num_cand_mentions",
    "overlap",
    "prf",
    "prf_docs",
    "prf_terms",
    "rrf_k",
    "threshold",
    "topk",
    "window_size",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(UsageError(format!(
                    "config line {}: expected `key = value`",
                    i + 1
                )));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                bail!(UsageError(format!(
                    "config line {}: unknown key {key:?} (known: {})",
                    i + 1,
                    KEYS.join(", ")
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    /// Flag value if given, else the config value, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        debug_assert!(KEYS.contains(&key), "undeclared config key {key}");
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw.parse().map_err(|e| {
                UsageError(format!("config key {key}: cannot parse {raw:?}: {e}")).into()
            }),
            None => Ok(default),
        }
    }

    /// Boolean switch: a present flag wins, otherwise the config decides.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        self.pick(flag.then_some(true), key, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let cfg =
            Config::parse("k1 = 0.9\n# comment\nb=0.5 # trailing\n\nidf_floor0 = true\n").unwrap();
        assert_eq!(cfg.pick(Some(1.2), "k1", 0.82).unwrap(), 1.2);
        assert_eq!(cfg.pick(None, "k1", 0.82).unwrap(), 0.9);
        assert_eq!(cfg.pick(None, "b", 0.68).unwrap(), 0.5);
        assert_eq!(cfg.pick(None, "topk", 1000usize).unwrap(), 1000);
        assert!(cfg.switch(false, "idf_floor0").unwrap());
        assert!(!Config::default().switch(false, "prf").unwrap());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(Config::parse("colour = red\n").is_err());
        assert!(Config::parse("k1 0.9\n").is_err());
        let cfg = Config::parse("topk = lots\n").unwrap();
        assert!(cfg.pick(None, "topk", 10usize).is_err());
    }
}
