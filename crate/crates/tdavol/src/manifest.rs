//! Output-directory manifest: every emitted file with its SHA-256 digest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::AnalysisConfig;
use crate::error::{PipelineError, Result};
use crate::tables::write_json;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    seed: u64,
    config_digest: String,
    config: BTreeMap<&'a str, String>,
    files: Vec<Entry>,
}

fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in std::fs::read_dir(dir).map_err(PipelineError::io(dir))? {
        let path = entry.map_err(PipelineError::io(dir))?.path();
        if path.is_dir() {
            walk(root, &path, out)?;
        } else if path.strip_prefix(root).map_or(true, |p| p != Path::new(MANIFEST)) {
            out.push(path);
        }
    }
    Ok(())
}

/// Every file under `dir` except the manifest itself, sorted by path.
pub fn scan(dir: &Path) -> Result<Vec<Entry>> {
    let mut paths = Vec::new();
    walk(dir, dir, &mut paths)?;
    let mut entries = paths
        .into_iter()
        .map(|p| {
            let bytes = std::fs::read(&p).map_err(PipelineError::io(&p))?;
            let rel = p
                .strip_prefix(dir)
                .expect("walk stays under root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            Ok(Entry {
                path: rel,
                bytes: bytes.len() as u64,
                sha256: hex::encode(Sha256::digest(&bytes)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(entries)
}

/// Writes `manifest.json` describing the current contents of `cfg.out`.
pub fn write_manifest(cfg: &AnalysisConfig) -> Result<Vec<Entry>> {
    let files = scan(&cfg.out)?;
    let manifest = Manifest {
        seed: cfg.seed,
        config_digest: cfg.digest(),
        config: cfg.result_entries().into_iter().collect(),
        files: files.clone(),
    };
    write_json(&cfg.out.join(MANIFEST), &manifest)?;
    Ok(files)
}
