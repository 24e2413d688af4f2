//! Flat key=value manifests: the run records written next to every
//! artifact, and the clip listings datasets are described with. Insertion
//! order is kept on write so a rerun reproduces the file byte for byte.

use std::path::Path;

use smash_core::{Error, Result};

use super::{read_text, write_text};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    /// Inserts or replaces in place, preserving first-insertion order.
    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, path: &str) -> Result<Manifest> {
        let fail = |line: usize, detail: String| Error::Format {
            path: path.to_string(),
            detail: format!("line {line}: {detail}"),
        };
        let mut manifest = Manifest::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail(i + 1, "expected key=value".to_string()))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(fail(i + 1, "empty key".to_string()));
            }
            if manifest.get(key).is_some() {
                return Err(fail(i + 1, format!("duplicate key '{key}'")));
            }
            manifest.entries.push((key.to_string(), value.trim().to_string()));
        }
        Ok(manifest)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = read_text(path)?;
        Manifest::parse(&text, &super::path_str(path))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.render())
    }
}
