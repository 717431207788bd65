//! Flat `key = value` configuration files: one assignment per line,
//! `#` comments, no sections, no nesting. Command-line flags override.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{anyhow, Context, Result};

#[derive(Debug, Default)]
pub struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigMap::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {} is not key=value: `{raw}`", lineno + 1))?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigMap { values })
    }

    pub fn get_string(&self, key: &str) -> Option<String> {
        self.values.get(key).cloned()
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.values
            .get(key)
            .map(|v| v.parse::<f64>().with_context(|| format!("config key `{key}`")))
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.values
            .get(key)
            .map(|v| v.parse::<u64>().with_context(|| format!("config key `{key}`")))
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.values
            .get(key)
            .map(|v| v.parse::<usize>().with_context(|| format!("config key `{key}`")))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_flat_pairs_and_comments() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# run defaults").unwrap();
        writeln!(f, "n = 3").unwrap();
        writeln!(f, "lambda=0.5  # inline comment").unwrap();
        writeln!(f, "x = 0,0,2").unwrap();
        let cfg = ConfigMap::load(Some(f.path())).unwrap();
        assert_eq!(cfg.get_usize("n").unwrap(), Some(3));
        assert_eq!(cfg.get_f64("lambda").unwrap(), Some(0.5));
        assert_eq!(cfg.get_string("x").unwrap(), "0,0,2");
        assert!(cfg.get_string("missing").is_none());
    }

    #[test]
    fn rejects_malformed_lines() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "just words").unwrap();
        assert!(ConfigMap::load(Some(f.path())).is_err());
    }
}
