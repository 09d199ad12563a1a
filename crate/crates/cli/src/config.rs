//! Optional `key = value` files whose entries override command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    /// Keys are normalized so `max_depth` and `max-depth` are the same key.
    pub fn parse(text: &str) -> CliResult<Config> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Malformed { line: i + 1, msg: "expected `key = value`".into() })?;
            let k = k.trim().replace('_', "-");
            if k.is_empty() {
                return Err(CliError::Malformed { line: i + 1, msg: "empty key".into() });
            }
            entries.insert(k, v.trim().to_string());
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> CliResult<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Config::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// The config value if present, else the flag.
    pub fn or_flag(&self, key: &str, flag: Option<String>) -> Option<String> {
        self.get(key).map(str::to_string).or(flag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let c = Config::parse("# run\nseed = 7\nmax_depth=3\n\n").unwrap();
        assert_eq!(c.get("seed"), Some("7"));
        assert_eq!(c.or_flag("max-depth", Some("9".into())), Some("3".into()));
        assert_eq!(c.or_flag("trials", Some("9".into())), Some("9".into()));
        assert!(Config::parse("seed 7\n").is_err());
    }
}
