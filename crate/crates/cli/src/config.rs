//! Flat `key = value` run configurations.
//!
//! A [`RunConfig`] holds the command path and every parameter the command
//! read, defaults included, so that it alone reproduces the run.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: Vec<String>,
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    /// Parses a config file. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected `key = value`, got `{line}`", i + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
            }
            if key == "command" {
                cfg.command = value.split_whitespace().map(str::to_string).collect();
            } else if cfg.params.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::Usage(format!("config line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Canonical text: the command line first, then keys in sorted order.
    pub fn to_text(&self) -> String {
        let mut out = format!("command = {}\n", self.command.join(" "));
        for (k, v) in &self.params {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn params(&mut self) -> Params<'_> {
        Params { map: &mut self.params }
    }
}

/// Typed access to the parameters; defaults are written back so the
/// config records them.
pub struct Params<'a> {
    map: &'a mut BTreeMap<String, String>,
}

impl Params<'_> {
    pub fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn text(&mut self, key: &str) -> Result<String, CliError> {
        self.map.get(key).cloned().ok_or_else(|| CliError::Usage(format!("missing required parameter --{key}")))
    }

    pub fn text_or(&mut self, key: &str, default: &str) -> String {
        self.map.entry(key.to_string()).or_insert_with(|| default.to_string()).clone()
    }

    pub fn parse<T: FromStr>(&mut self, key: &str) -> Result<T, CliError> {
        let raw = self.text(key)?;
        parse_value(key, &raw)
    }

    pub fn parse_or<T: FromStr + Display>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        let raw = self.text_or(key, &default.to_string());
        parse_value(key, &raw)
    }

    pub fn flag(&mut self, key: &str) -> Result<bool, CliError> {
        self.parse_or(key, false)
    }
}

pub fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim().parse().map_err(|_| CliError::Usage(format!("cannot parse --{key} value `{raw}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_hash() {
        let text = "# a comment\ncommand = check polya\nprofile = exp_power(0.5)\n\ntol=1e-6\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.command, vec!["check", "polya"]);
        let again = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn defaults_are_recorded() {
        let mut cfg = RunConfig::default();
        let tol: f64 = cfg.params().parse_or("tol", 1e-6).unwrap();
        assert_eq!(tol, 1e-6);
        assert_eq!(cfg.params["tol"], "0.000001");
        assert!(cfg.params().parse::<usize>("n").is_err());
    }

    #[test]
    fn malformed_lines() {
        assert!(RunConfig::parse("no equals sign").is_err());
        assert!(RunConfig::parse("a = 1\na = 2").is_err());
    }
}
