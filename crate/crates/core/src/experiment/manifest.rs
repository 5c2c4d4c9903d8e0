//! Dataset directories: one `DAMP` file per subset plus a JSON-lines manifest.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset_file;
use crate::error::{Error, Result};
use crate::generators::Subset;
use crate::patterns::Source;

pub const MANIFEST_NAME: &str = "manifest.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub subset_id: usize,
    pub file: String,
    pub source: Source,
    pub skew_p: Option<f64>,
    pub target_hd: Option<f64>,
    pub realized_mean_hd: f64,
    pub seed: u64,
}

/// Writes every subset as `<prefix>-<id>.damp` and a manifest listing them.
pub fn write_dataset_dir(dir: &Path, prefix: &str, subsets: &[Subset]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest_path = dir.join(MANIFEST_NAME);
    let f = File::create(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut w = BufWriter::new(f);
    for s in subsets {
        let file = format!("{prefix}-{:03}.damp", s.id);
        dataset_file::save(&s.set, dir.join(&file))?;
        let entry = ManifestEntry {
            subset_id: s.id,
            file,
            source: s.set.source,
            skew_p: s.set.skew_p,
            target_hd: s.set.target_hd,
            realized_mean_hd: s.realized_mean_hd,
            seed: s.set.seed,
        };
        serde_json::to_writer(&mut w, &entry)?;
        w.write_all(b"\n")
            .map_err(|e| Error::io(&manifest_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest_path)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(serde_json::from_str(&line)?);
    }
    Ok(entries)
}
