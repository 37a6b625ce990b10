//! Literal inputs: comma lists, JSON arrays, or `@path` to read either from a file.

use genbound::{Error, Result};

fn resolve(raw: &str) -> Result<String> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}"))),
        None => Ok(raw.to_string()),
    }
}

fn number(tok: &str, flag: &str) -> Result<f64> {
    tok.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("--{flag}: {:?} is not a number", tok.trim())))
}

fn comma_list(text: &str, flag: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse(format!("--{flag} is empty")));
    }
    text.split(',').map(|t| number(t, flag)).collect()
}

/// A list of reals: `0.2,0.8`, `[0.2, 0.8]`, or `@file` holding either.
pub fn vector(raw: &str, flag: &str) -> Result<Vec<f64>> {
    let text = resolve(raw)?;
    let text = text.trim();
    if text.starts_with('[') {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("--{flag}: {e}")))
    } else {
        comma_list(text, flag)
    }
}

/// A matrix: rows separated by `;` (`0.4,0.1;0.1,0.4`), a JSON array of arrays, or `@file`.
pub fn matrix(raw: &str, flag: &str) -> Result<Vec<Vec<f64>>> {
    let text = resolve(raw)?;
    let text = text.trim();
    if text.starts_with('[') {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("--{flag}: {e}")))
    } else {
        text.split(';').map(|row| comma_list(row, flag)).collect()
    }
}

pub fn scalar(raw: &str, flag: &str) -> Result<f64> {
    number(raw, flag)
}
