//! Persisted memo table shared across `covdeg` runs.
//!
//! The file holds one section per rule configuration. Files with another
//! format tag or version, or that fail to parse, are ignored and replaced on
//! the next write. Access is serialized by an exclusive lock on a sidecar
//! `.lock` file; a second process fails fast instead of waiting.

use std::fs::{self, File, OpenOptions, TryLockError};
use std::io::Write;
use std::path::{Path, PathBuf};

use covbound_core::covdeg::{Memo, MemoRecord, RuleConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CACHE_FORMAT: &str = "covbound-memo";
pub const CACHE_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "COVBOUND_CACHE";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache {0} is locked by another process")]
    Locked(PathBuf),
    #[error("cache {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    format: String,
    version: u32,
    sections: Vec<Section>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Section {
    config: RuleConfig,
    records: Vec<MemoRecord>,
}

/// An open, locked cache. The lock is released on drop.
pub struct MemoCache {
    path: PathBuf,
    sections: Vec<Section>,
    /// Why the existing file was ignored, if it was.
    pub ignored: Option<String>,
    _lock: File,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CacheError + '_ {
    move |source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn lock_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".lock");
    PathBuf::from(name)
}

impl MemoCache {
    pub fn open(path: &Path) -> Result<MemoCache, CacheError> {
        let lock_file = lock_path(path);
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&lock_file)
            .map_err(io_err(&lock_file))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(TryLockError::WouldBlock) => return Err(CacheError::Locked(path.to_path_buf())),
            Err(TryLockError::Error(e)) => return Err(io_err(&lock_file)(e)),
        }
        let (sections, ignored) = match fs::read_to_string(path) {
            Ok(text) => match serde_json::from_str::<CacheFile>(&text) {
                Ok(f) if f.format == CACHE_FORMAT && f.version == CACHE_VERSION => (f.sections, None),
                Ok(f) => (
                    Vec::new(),
                    Some(format!("stale cache format {:?} version {}", f.format, f.version)),
                ),
                Err(e) => (Vec::new(), Some(format!("unreadable cache: {e}"))),
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => (Vec::new(), None),
            Err(e) => return Err(io_err(path)(e)),
        };
        Ok(MemoCache {
            path: path.to_path_buf(),
            sections,
            ignored,
            _lock: lock,
        })
    }

    /// The stored memo for `config`. Sections whose records fail validation
    /// are dropped.
    pub fn memo(&mut self, config: RuleConfig) -> Memo {
        let Some(i) = self.sections.iter().position(|s| s.config == config) else {
            return Memo::default();
        };
        match Memo::from_records(self.sections[i].records.clone()) {
            Ok(memo) => memo,
            Err(e) => {
                self.ignored = Some(format!("invalid cache section: {e}"));
                self.sections.remove(i);
                Memo::default()
            }
        }
    }

    /// Replaces the section for `config` and writes the file atomically.
    pub fn store(&mut self, config: RuleConfig, memo: &Memo) -> Result<(), CacheError> {
        let records = memo.records();
        match self.sections.iter_mut().find(|s| s.config == config) {
            Some(s) => s.records = records,
            None => self.sections.push(Section { config, records }),
        }
        let file = CacheFile {
            format: CACHE_FORMAT.into(),
            version: CACHE_VERSION,
            sections: std::mem::take(&mut self.sections),
        };
        let text = serde_json::to_string(&file).expect("cache serializes");
        self.sections = file.sections;
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err(&dir))?;
        tmp.write_all(text.as_bytes()).map_err(io_err(&self.path))?;
        tmp.persist(&self.path).map_err(|e| io_err(&self.path)(e.error))?;
        Ok(())
    }
}
