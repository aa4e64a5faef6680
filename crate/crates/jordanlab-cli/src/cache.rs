//! On-disk result cache: one JSON file per prime, entries sorted by `(r, s)`.
//!
//! Entries record the tool version that produced them; entries from other
//! versions are ignored on load. Corrupt files are discarded and recomputed.
//! Writes go through a temp file renamed into place.

use std::collections::BTreeMap;
use std::env;
use std::fs;
use std::path::PathBuf;

use jordanlab::jordan::{Composition, RunLengthPartition};
use serde_json::{json, Value};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Cache directory: `$JORDANLAB_CACHE`, else `$HOME/.cache/jordanlab`, else a
/// temp-dir fallback.
pub fn cache_dir() -> PathBuf {
    if let Ok(dir) = env::var("JORDANLAB_CACHE") {
        return PathBuf::from(dir);
    }
    if let Ok(home) = env::var("HOME") {
        return PathBuf::from(home).join(".cache").join("jordanlab");
    }
    env::temp_dir().join("jordanlab-cache")
}

pub struct CacheFile {
    path: PathBuf,
    entries: BTreeMap<(u64, u64), (Vec<u64>, Vec<(u64, u64)>)>,
    dirty: bool,
}

impl CacheFile {
    pub fn open(p: u64) -> Self {
        let dir = cache_dir();
        let path = dir.join(format!("p{p}.json"));
        let mut entries = BTreeMap::new();
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(doc) = serde_json::from_str::<Value>(&text) {
                for entry in doc["entries"].as_array().unwrap_or(&Vec::new()) {
                    if entry["tool_version"].as_str() != Some(TOOL_VERSION) {
                        continue;
                    }
                    let (Some(r), Some(s)) = (entry["r"].as_u64(), entry["s"].as_u64()) else {
                        continue;
                    };
                    let Some(comp) = read_u64_array(&entry["composition"]) else { continue };
                    let Some(runs) = read_run_array(&entry["partition"]) else { continue };
                    entries.insert((r, s), (comp, runs));
                }
            }
        }
        Self { path, entries, dirty: false }
    }

    pub fn get(&self, r: u64, s: u64) -> Option<(Composition, RunLengthPartition)> {
        let (comp, runs) = self.entries.get(&(r, s))?;
        // Untrusted data: reject anything violating the run-length invariants
        // rather than panicking in the validating constructor.
        let decreasing = runs.windows(2).all(|w| w[0].1 > w[1].1);
        let positive = runs.iter().all(|&(m, v)| m > 0 && v > 0);
        if !decreasing || !positive || comp.iter().any(|&e| e == 0) {
            return None;
        }
        Some((Composition::new(comp.clone()), RunLengthPartition::from_runs(runs.clone())))
    }

    pub fn put(&mut self, r: u64, s: u64, comp: &Composition, part: &RunLengthPartition) {
        let value = (comp.entries().to_vec(), part.runs().to_vec());
        if self.entries.get(&(r, s)) != Some(&value) {
            self.entries.insert((r, s), value);
            self.dirty = true;
        }
    }

    /// Persist if anything changed. Failures are reported but non-fatal: the
    /// cache is an optimization, not a correctness dependency.
    pub fn save(&mut self, p: u64) {
        if !self.dirty {
            return;
        }
        let rows: Vec<Value> = self
            .entries
            .iter()
            .map(|(&(r, s), (comp, runs))| {
                json!({
                    "r": r,
                    "s": s,
                    "tool_version": TOOL_VERSION,
                    "composition": comp,
                    "partition": runs,
                })
            })
            .collect();
        let doc = json!({ "p": p, "entries": rows });
        let Some(dir) = self.path.parent() else { return };
        if fs::create_dir_all(dir).is_err() {
            eprintln!("warning: cannot create cache dir {}", dir.display());
            return;
        }
        let tmp = self.path.with_extension(format!("tmp.{}", std::process::id()));
        let write = fs::write(&tmp, doc.to_string()).and_then(|_| fs::rename(&tmp, &self.path));
        if let Err(e) = write {
            let _ = fs::remove_file(&tmp);
            eprintln!("warning: cache write failed: {e}");
        } else {
            self.dirty = false;
        }
    }
}

fn read_u64_array(v: &Value) -> Option<Vec<u64>> {
    v.as_array()?.iter().map(|e| e.as_u64()).collect()
}

fn read_run_array(v: &Value) -> Option<Vec<(u64, u64)>> {
    v.as_array()?
        .iter()
        .map(|pair| {
            let pair = pair.as_array()?;
            if pair.len() != 2 {
                return None;
            }
            Some((pair[0].as_u64()?, pair[1].as_u64()?))
        })
        .collect()
}
