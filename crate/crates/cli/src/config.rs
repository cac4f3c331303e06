//! `key = value` config files, merged into argv before parsing.

use std::fs;

use crate::error::{CliError, CliResult};

/// Appends `--key value` for every config entry whose flag is absent from `argv`.
pub fn expand(argv: Vec<String>) -> CliResult<Vec<String>> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let entries = parse(&text).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let mut out = argv;
    let present: Vec<String> = out
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (key, value) in entries {
        if present.contains(&key) {
            continue;
        }
        match value.as_str() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value);
            }
        }
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> CliResult<Option<String>> {
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_string()));
        }
        if a == "--config" {
            return argv
                .get(i + 1)
                .cloned()
                .map(Some)
                .ok_or_else(|| CliError::Usage("--config needs a file".into()));
        }
    }
    Ok(None)
}

/// Parses lines of `key = value`; `#` starts a comment line. Keys may use `_` or `-`.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", no + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(format!("line {}: bad key `{}`", no + 1, k.trim()));
        }
        out.push((key, v.trim().trim_matches('"').to_string()));
    }
    Ok(out)
}
