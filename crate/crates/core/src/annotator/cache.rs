//! Record/replay cache for annotation runs.
//!
//! The cache is an append-only JSON Lines file of
//! `{key, request, response, timestamp}` entries. Keys hash the full request
//! identity — task, prompt name, shots, model, review id, review text — so
//! editing a prompt invalidates stale entries.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Task;
use crate::error::{Error, Result};

/// One recorded request/response pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub request: serde_json::Value,
    pub response: String,
    pub timestamp: u64,
}

/// Compute the cache key for one annotation request.
pub fn cache_key(
    task: Task,
    prompt_name: &str,
    shots: u8,
    model: &str,
    review_id: &str,
    review_text: &str,
) -> String {
    let mut hasher = Sha256::new();
    for part in [
        task.as_str(),
        prompt_name,
        &shots.to_string(),
        model,
        review_id,
        review_text,
    ] {
        // Length-prefix each part so concatenations cannot collide.
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// An in-memory view of a recorded cache, used by the replay backend.
/// Duplicate keys keep the last entry.
#[derive(Debug)]
pub struct ReplayCache {
    responses: HashMap<String, String>,
}

impl ReplayCache {
    pub fn load(path: &Path) -> Result<ReplayCache> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut responses = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CacheEntry =
                serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            responses.insert(entry.key, entry.response);
        }
        Ok(ReplayCache { responses })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.responses.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

/// Appends entries to a cache file, serializing writes across threads.
#[derive(Debug)]
pub struct CacheRecorder {
    path: PathBuf,
    file: Mutex<std::fs::File>,
}

impl CacheRecorder {
    pub fn open(path: &Path) -> Result<CacheRecorder> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(CacheRecorder {
            path: path.to_path_buf(),
            file: Mutex::new(file),
        })
    }

    pub fn append(&self, key: &str, request: serde_json::Value, response: &str) -> Result<()> {
        let entry = CacheEntry {
            key: key.to_string(),
            request,
            response: response.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let mut line = serde_json::to_string(&entry).expect("cache entries serialize");
        line.push('\n');
        let mut file = self.file.lock().expect("cache file lock");
        file.write_all(line.as_bytes()).map_err(|source| Error::Io {
            path: self.path.clone(),
            source,
        })
    }
}
