//! Labeled clip collections. A dataset manifest maps each clip -- an RVF
//! file or a PGM frame directory -- to its action label, an optional
//! training crop, and an optional fold group:
//!
//! ```text
//! clips/daria_walk=walk:crops/daria_walk:daria
//! clips/ido_jump=jump
//! ```
//!
//! Paths are resolved relative to the manifest's directory. Without a crop
//! the clip itself is the training example; without a group every clip is
//! its own leave-one-out fold.

use std::path::{Path, PathBuf};

use smash_core::{Result, Volume};

use crate::io::manifest::Manifest;
use crate::io::{codec, pgm};

#[derive(Debug, Clone)]
pub struct DatasetEntry {
    /// The manifest key, used in reports.
    pub name: String,
    pub video: PathBuf,
    pub label: String,
    pub crop: Option<PathBuf>,
    pub group: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub entries: Vec<DatasetEntry>,
}

impl Dataset {
    pub fn load(path: &Path) -> Result<Dataset> {
        let manifest = Manifest::load(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut entries = Vec::with_capacity(manifest.len());
        for (key, value) in manifest.entries() {
            let mut parts = value.splitn(3, ':');
            let label = parts.next().unwrap_or_default().to_string();
            if label.is_empty() {
                return Err(smash_core::Error::Format {
                    path: crate::io::path_str(path),
                    detail: format!("clip '{key}' has no label"),
                });
            }
            let crop = parts.next().filter(|s| !s.is_empty()).map(|s| base.join(s));
            let group = parts.next().filter(|s| !s.is_empty()).map(str::to_string);
            entries.push(DatasetEntry {
                name: key.clone(),
                video: base.join(key),
                label,
                crop,
                group,
            });
        }
        Ok(Dataset { entries })
    }

    /// Distinct labels in first-appearance order.
    pub fn actions(&self) -> Vec<String> {
        let mut actions: Vec<String> = Vec::new();
        for e in &self.entries {
            if !actions.contains(&e.label) {
                actions.push(e.label.clone());
            }
        }
        actions
    }
}

/// Clip loader shared by every command: directories are PGM frame
/// sequences, files are RVF volumes.
pub fn load_video(path: &Path) -> Result<Volume> {
    if path.is_dir() {
        pgm::read_pgm_dir(path)
    } else {
        codec::load_volume(path)
    }
}
