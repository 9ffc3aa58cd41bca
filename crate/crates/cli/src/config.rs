//! Optional `key = value` defaults file. Command-line flags take precedence.

use std::path::{Path, PathBuf};

use crate::output::Format;
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub quiet: Option<bool>,
    pub cap: Option<u64>,
    pub node_cap: Option<usize>,
}

fn usage(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{}:{line}: {msg}", path.display()))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(path: &Path, text: &str) -> Result<FileConfig, CliError> {
    let mut cfg = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(path, i + 1, "expected key = value"))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |_| usage(path, i + 1, format!("bad value for {key}: {value}"));
        match key {
            "format" => {
                cfg.format = Some(
                    <Format as clap::ValueEnum>::from_str(value, true)
                        .map_err(|_| usage(path, i + 1, format!("unknown format {value}")))?,
                )
            }
            "output" => cfg.output = Some(PathBuf::from(value)),
            "threads" => cfg.threads = Some(value.parse().map_err(bad)?),
            "quiet" => {
                cfg.quiet = Some(value.parse().map_err(|_| usage(path, i + 1, "quiet takes true or false"))?)
            }
            "cap" => cfg.cap = Some(value.parse().map_err(bad)?),
            "node_cap" => cfg.node_cap = Some(value.parse().map_err(bad)?),
            other => return Err(usage(path, i + 1, format!("unknown key {other}"))),
        }
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
    parse(path, &text)
}
