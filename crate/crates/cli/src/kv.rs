//! Flat `key = value` text files, used for run configs and verification fixtures.

use std::fmt;

/// Parse failure with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for KvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for KvError {}

/// Ordered `(key, value)` pairs. Blank lines and `#` comments are skipped;
/// keys must be unique.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, KvError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(KvError { line: i + 1, message: format!("expected `key = value`, got `{line}`") });
        };
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(KvError { line: i + 1, message: "empty key".into() });
        }
        if out.iter().any(|(existing, _)| *existing == key) {
            return Err(KvError { line: i + 1, message: format!("duplicate key `{key}`") });
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Comma- or whitespace-separated floats.
pub fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}
