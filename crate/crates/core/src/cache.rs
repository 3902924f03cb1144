//! On-disk cache of materialized function sets, keyed by arity and cycle type.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::hypercube::CycleType;
use crate::mbf::MbfSet;
use crate::mbfs;

pub const ENV_VAR: &str = "MONOTONE_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

/// A cached file and its size in bytes.
#[derive(Clone, Debug)]
pub struct CacheEntry {
    pub name: String,
    pub bytes: u64,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `$MONOTONE_CACHE_DIR`, else `$XDG_CACHE_HOME/monotone-census`, else
    /// `~/.cache/monotone-census`.
    pub fn default_dir() -> Option<PathBuf> {
        let var = |k: &str| {
            std::env::var_os(k)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        };
        var(ENV_VAR)
            .or_else(|| var("XDG_CACHE_HOME").map(|d| d.join("monotone-census")))
            .or_else(|| var("HOME").map(|d| d.join(".cache").join("monotone-census")))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// File name for `Φ_n` of a cycle type; the identity gives `d{n}.mbfs`.
    pub fn key(t: &CycleType) -> String {
        if t.is_identity() {
            format!("d{}.mbfs", t.n())
        } else {
            let lengths: Vec<String> = t.lengths().map(|l| l.to_string()).collect();
            format!("phi{}_{}.mbfs", t.n(), lengths.join("-"))
        }
    }

    pub fn path(&self, t: &CycleType) -> PathBuf {
        self.dir.join(Self::key(t))
    }

    pub fn load(&self, t: &CycleType) -> Result<Option<MbfSet>> {
        let path = self.path(t);
        if !path.exists() {
            return Ok(None);
        }
        let set = mbfs::load(&path)?;
        if set.n() != t.n() {
            return Err(Error::Format {
                path,
                reason: format!("holds {}-variable functions", set.n()),
            });
        }
        Ok(Some(set))
    }

    pub fn store(&self, t: &CycleType, set: &MbfSet) -> Result<PathBuf> {
        let path = self.path(t);
        mbfs::save(set, &path)?;
        Ok(path)
    }

    pub fn list(&self) -> Result<Vec<CacheEntry>> {
        let read = match std::fs::read_dir(&self.dir) {
            Ok(r) => r,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Error::io(&self.dir, e)),
        };
        let mut entries = Vec::new();
        for item in read {
            let item = item.map_err(|e| Error::io(&self.dir, e))?;
            let name = item.file_name().to_string_lossy().into_owned();
            if !name.ends_with(".mbfs") {
                continue;
            }
            let bytes = item
                .metadata()
                .map_err(|e| Error::io(item.path(), e))?
                .len();
            entries.push(CacheEntry { name, bytes });
        }
        entries.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(entries)
    }

    /// Removes every cached set; returns how many files were deleted.
    pub fn clear(&self) -> Result<usize> {
        let entries = self.list()?;
        for e in &entries {
            let path = self.dir.join(&e.name);
            std::fs::remove_file(&path).map_err(|err| Error::io(&path, err))?;
        }
        Ok(entries.len())
    }
}
