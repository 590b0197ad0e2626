//! `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Recognised keys are
//! `n K P p q k trials seed workers out`; anything else is a usage error.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub ring_size: Option<usize>,
    pub pool_size: Option<usize>,
    pub channel_prob: Option<f64>,
    pub q: Option<usize>,
    pub k: Option<u32>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("config line {line}: bad value for `{key}`: {e}")))
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = FileConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {line_no}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => cfg.n = Some(parse_value(key, value, line_no)?),
                "K" => cfg.ring_size = Some(parse_value(key, value, line_no)?),
                "P" => cfg.pool_size = Some(parse_value(key, value, line_no)?),
                "p" => cfg.channel_prob = Some(parse_value(key, value, line_no)?),
                "q" => cfg.q = Some(parse_value(key, value, line_no)?),
                "k" => cfg.k = Some(parse_value(key, value, line_no)?),
                "trials" => cfg.trials = Some(parse_value(key, value, line_no)?),
                "seed" => cfg.seed = Some(parse_value(key, value, line_no)?),
                "workers" => cfg.workers = Some(parse_value(key, value, line_no)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::Usage(format!("config line {line_no}: unknown key `{other}`")));
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }
}
