//! On-disk cache of enumeration results: one JSONL file of canonical
//! diagram texts per query plus a manifest with counts and SHA-256 hashes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{enumerate, DiagramQuery};
use crate::error::Result;
use crate::model::FloorDiagram;

pub const CACHE_ENV: &str = "FLOORDIAG_CACHE_DIR";
const MANIFEST: &str = "manifest.json";

#[derive(Serialize, Deserialize, Default)]
struct Manifest {
    entries: BTreeMap<String, ManifestEntry>,
}

#[derive(Serialize, Deserialize, Clone)]
struct ManifestEntry {
    file: String,
    count: usize,
    sha256: String,
}

pub struct DiagramCache {
    dir: PathBuf,
    lock: Mutex<()>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn body_of(diagrams: &[FloorDiagram]) -> String {
    let mut body = String::new();
    for dg in diagrams {
        body.push_str(&serde_json::to_string(&dg.to_text()).expect("string json"));
        body.push('\n');
    }
    body
}

impl DiagramCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(DiagramCache { dir, lock: Mutex::new(()) })
    }

    /// Cache rooted at `$FLOORDIAG_CACHE_DIR`, if set.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Ok(Some(Self::new(PathBuf::from(d))?)),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file_name(q: &DiagramQuery) -> String {
        let h = Sha256::digest(q.key().as_bytes());
        format!("{}.jsonl", hex(&h[..8]))
    }

    fn read_manifest(&self) -> Manifest {
        fs::read_to_string(self.dir.join(MANIFEST))
            .ok()
            .and_then(|s| serde_json::from_str(&s).ok())
            .unwrap_or_default()
    }

    /// Cached result, or `None` when absent or when the file fails its hash.
    pub fn load(&self, q: &DiagramQuery) -> Result<Option<Vec<FloorDiagram>>> {
        let _g = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let Some(entry) = self.read_manifest().entries.get(&q.key()).cloned() else {
            return Ok(None);
        };
        let Ok(body) = fs::read_to_string(self.dir.join(&entry.file)) else {
            return Ok(None);
        };
        if hex(&Sha256::digest(body.as_bytes())) != entry.sha256 {
            return Ok(None);
        }
        let mut out = Vec::with_capacity(entry.count);
        for line in body.lines().filter(|l| !l.is_empty()) {
            let text: String = serde_json::from_str(line)?;
            out.push(text.parse()?);
        }
        if out.len() != entry.count {
            return Ok(None);
        }
        Ok(Some(out))
    }

    pub fn store(&self, q: &DiagramQuery, diagrams: &[FloorDiagram]) -> Result<()> {
        let _g = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let body = body_of(diagrams);
        let file = Self::file_name(q);
        write_atomic(&self.dir.join(&file), body.as_bytes())?;
        let mut m = self.read_manifest();
        m.entries.insert(
            q.key(),
            ManifestEntry { file, count: diagrams.len(), sha256: hex(&Sha256::digest(body.as_bytes())) },
        );
        write_atomic(&self.dir.join(MANIFEST), serde_json::to_string_pretty(&m)?.as_bytes())?;
        Ok(())
    }

    pub fn get_or_enumerate(&self, q: &DiagramQuery) -> Result<Vec<FloorDiagram>> {
        if let Some(v) = self.load(q)? {
            return Ok(v);
        }
        let v = enumerate(q)?;
        self.store(q, &v)?;
        Ok(v)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = DiagramCache::new(tmp.path()).unwrap();
        let q = DiagramQuery::genus(4, 1);
        assert!(cache.load(&q).unwrap().is_none());
        let first = cache.get_or_enumerate(&q).unwrap();
        assert_eq!(first.len(), 13);
        assert_eq!(cache.load(&q).unwrap().unwrap(), first);

        // Tamper with the data file: the hash check must reject it.
        let f = tmp.path().join(DiagramCache::file_name(&q));
        let mut body = fs::read_to_string(&f).unwrap();
        body.push_str("\"d=1; edges=\"\n");
        fs::write(&f, body).unwrap();
        assert!(cache.load(&q).unwrap().is_none());
        assert_eq!(cache.get_or_enumerate(&q).unwrap(), first);
    }
}
