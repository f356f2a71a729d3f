//! Content-addressed on-disk cache for per-level results.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Bumped whenever a cached computation changes meaning.
pub const CACHE_VERSION: &str = concat!("ffsturm-", env!("CARGO_PKG_VERSION"), "-c1");

/// Environment variable that overrides any configured directory.
pub const CACHE_ENV: &str = "FFSTURM_CACHE";

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: Some(dir.into()) }
    }

    /// FFSTURM_CACHE if set and non-empty, else `dir`.
    pub fn from_env_or(dir: Option<&Path>) -> Cache {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Cache::at(PathBuf::from(v)),
            _ => Cache { dir: dir.map(Path::to_path_buf) },
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(q: u32, level: &str, op: &str) -> String {
        let mut h = Sha256::new();
        for part in [CACHE_VERSION, &q.to_string(), level, op] {
            h.update(part.as_bytes());
            h.update([0]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(&key[..2]).join(format!("{key}.json")))
    }

    pub fn get<T: DeserializeOwned>(&self, q: u32, level: &str, op: &str) -> Option<T> {
        let path = self.path(&Self::key(q, level, op))?;
        let text = fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put<T: Serialize>(&self, q: u32, level: &str, op: &str, value: &T) -> Result<()> {
        let Some(path) = self.path(&Self::key(q, level, op)) else { return Ok(()) };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        // write then rename so concurrent readers never see a partial file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(value)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn get_or_compute<T, F>(&self, q: u32, level: &str, op: &str, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(v) = self.get(q, level, op) {
            return Ok(v);
        }
        let v = compute()?;
        self.put(q, level, op, &v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_disabled() {
        let dir = std::env::temp_dir().join(format!("ffsturm-cache-test-{}", std::process::id()));
        let c = Cache::at(&dir);
        let mut calls = 0;
        for _ in 0..2 {
            let v: Vec<i64> = c
                .get_or_compute(2, "T^3 + T + 1", "b_true", || {
                    calls += 1;
                    Ok(vec![1, 2])
                })
                .unwrap();
            assert_eq!(v, vec![1, 2]);
        }
        assert_eq!(calls, 1);
        assert_ne!(Cache::key(2, "T^3", "a"), Cache::key(3, "T^3", "a"));
        assert!(Cache::disabled().get::<i64>(2, "T", "x").is_none());
        fs::remove_dir_all(dir).unwrap();
    }
}
