//! On-disk results cache: one JSON document per canonical spiral.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::IsomerRecord;

pub const FORMAT_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "HYPFULL_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Envelope {
    format_version: u32,
    key: String,
    checksum: String,
    record: IsomerRecord,
}

fn checksum(record: &IsomerRecord) -> String {
    let text = serde_json::to_string(record).expect("records serialize");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    pub(crate) corrupt: AtomicU64,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, corrupt: AtomicU64::new(0) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// The cached record, or `None` if absent, from another format
    /// version, or failing its checksum (logged as a warning).
    pub fn load(&self, key: &str) -> Option<IsomerRecord> {
        let path = self.path_for(key);
        let text = fs::read_to_string(&path).ok()?;
        let env: Envelope = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(err) => {
                self.corrupt.fetch_add(1, Ordering::Relaxed);
                log::warn!("unreadable cache entry {}: {err}; recomputing", path.display());
                return None;
            }
        };
        if env.format_version != FORMAT_VERSION || env.key != key {
            return None;
        }
        if checksum(&env.record) != env.checksum {
            self.corrupt.fetch_add(1, Ordering::Relaxed);
            log::warn!("checksum mismatch in {}; recomputing", path.display());
            return None;
        }
        Some(env.record)
    }

    /// Writes to a temporary file and renames it into place.
    pub fn store(&self, key: &str, record: &IsomerRecord) -> std::io::Result<()> {
        let env = Envelope {
            format_version: FORMAT_VERSION,
            key: key.to_string(),
            checksum: checksum(record),
            record: record.clone(),
        };
        let text = serde_json::to_string_pretty(&env).map_err(std::io::Error::other)?;
        let path = self.path_for(key);
        static SEQ: AtomicU64 = AtomicU64::new(0);
        let seq = SEQ.fetch_add(1, Ordering::Relaxed);
        let tmp = self.dir.join(format!(".{key}.{}.{seq}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)
    }
}
