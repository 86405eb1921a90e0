//! Run configuration: a `key = value` file, overridden by command-line flags.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Json,
    Csv,
}

/// The settings shared by every subcommand. Worker count is deliberately not
/// part of the echo: it must not change any output byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub precision_bits: u64,
    pub emit: Emit,
    pub output: Option<String>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: 3,
            seed: 0,
            precision_bits: skewlab::dynamics::DEFAULT_PRECISION_BITS,
            emit: Emit::Json,
            output: None,
            threads: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, Failure> {
    value
        .parse()
        .map_err(|_| Failure::Usage(format!("config line {line}: bad value {value:?} for {key}")))
}

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), Failure> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("config line {}: expected key = value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let n = i + 1;
            match key {
                "K" | "k" => self.k = parse_value(key, value, n)?,
                "seed" => self.seed = parse_value(key, value, n)?,
                "precision_bits" => self.precision_bits = parse_value(key, value, n)?,
                "emit" => {
                    self.emit = Emit::from_str(value, true)
                        .map_err(|_| Failure::Usage(format!("config line {n}: emit must be json or csv")))?
                }
                "output" => self.output = Some(value.to_string()),
                "threads" => self.threads = Some(parse_value(key, value, n)?),
                _ => return Err(Failure::Usage(format!("config line {n}: unknown key {key:?}"))),
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut c = RunConfig::default();
        c.apply_text(&text)?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nK = 2\nseed=7  # trailing\nemit = csv\n").unwrap();
        assert_eq!((c.k, c.seed, c.emit), (2, 7, Emit::Csv));
        assert!(c.apply_text("colour = blue").is_err());
        assert!(c.apply_text("seed = x").is_err());
        assert!(c.apply_text("seed").is_err());
    }
}
