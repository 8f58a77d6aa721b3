//! Shared access to diagram enumerations, memoized in memory and
//! optionally persisted through a [`DiagramCache`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::enumeration::{enumerate, DiagramCache, DiagramQuery};
use crate::error::Result;
use crate::model::FloorDiagram;

#[derive(Default)]
pub struct Engine {
    cache: Option<DiagramCache>,
    memo: Mutex<HashMap<String, Arc<Vec<FloorDiagram>>>>,
}

impl Engine {
    pub fn new() -> Self {
        Engine::default()
    }

    pub fn with_cache(cache: DiagramCache) -> Self {
        Engine { cache: Some(cache), memo: Mutex::default() }
    }

    /// Uses `$FLOORDIAG_CACHE_DIR` when set.
    pub fn from_env() -> Result<Self> {
        Ok(match DiagramCache::from_env()? {
            Some(c) => Engine::with_cache(c),
            None => Engine::new(),
        })
    }

    pub fn diagrams(&self, q: &DiagramQuery) -> Result<Arc<Vec<FloorDiagram>>> {
        let key = q.key();
        if let Some(v) = self.memo.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(match &self.cache {
            Some(c) => c.get_or_enumerate(q)?,
            None => enumerate(q)?,
        });
        self.memo.lock().unwrap_or_else(|e| e.into_inner()).insert(key, v.clone());
        Ok(v)
    }
}
