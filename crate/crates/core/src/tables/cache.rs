use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AngleTable, Family, Key, Provenance};
use crate::exact::{HalfInt, PiExpr};
use crate::{Error, Result};

/// Schema tag written to and expected from cache files.
pub const CACHE_SCHEMA: &str = "simplex-angles-cache/v1";

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema: String,
    entries: Vec<CacheEntry>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    /// `[family, n, k, "2*param"]`
    key: (String, u32, u32, String),
    value: PiExpr,
    provenance: String,
}

/// Result of merging a cache file into a table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CacheLoad {
    pub loaded: usize,
    pub warning: Option<String>,
}

impl AngleTable {
    /// Serializes every entry, sorted by key.
    pub fn to_cache_json(&self) -> String {
        let entries = self
            .snapshot()
            .into_iter()
            .map(|(key, value, prov)| CacheEntry {
                key: (key.family.name().to_string(), key.n, key.k, key.param.twice().to_string()),
                value,
                provenance: prov.name().to_string(),
            })
            .collect();
        let file = CacheFile { schema: CACHE_SCHEMA.to_string(), entries };
        serde_json::to_string(&file).expect("cache serializes")
    }

    /// Merges cached entries. A file with a different schema tag is skipped
    /// with a warning; an entry disagreeing with a stored value is an error.
    pub fn load_cache_json(&self, text: &str) -> Result<CacheLoad> {
        #[derive(Deserialize)]
        struct Head {
            schema: Option<String>,
        }
        let head: Head = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match head.schema.as_deref() {
            Some(CACHE_SCHEMA) => {}
            other => {
                return Ok(CacheLoad {
                    loaded: 0,
                    warning: Some(format!(
                        "ignoring cache with schema {:?}; expected {CACHE_SCHEMA:?}",
                        other.unwrap_or("<missing>")
                    )),
                })
            }
        }
        let file: CacheFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut loaded = 0;
        for e in file.entries {
            let (fam, n, k, twice) = e.key;
            let family = Family::from_name(&fam)
                .ok_or_else(|| Error::Parse(format!("unknown family {fam:?} in cache")))?;
            let twice: i64 = twice
                .parse()
                .map_err(|_| Error::Parse(format!("bad parameter {twice:?} in cache")))?;
            let provenance = Provenance::from_name(&e.provenance)
                .ok_or_else(|| Error::Parse(format!("unknown provenance {:?} in cache", e.provenance)))?;
            let key = Key { family, n, k, param: HalfInt::from_twice(twice) };
            self.store(key, e.value, provenance)?;
            loaded += 1;
        }
        Ok(CacheLoad { loaded, warning: None })
    }

    /// Loads a cache file; a missing file loads nothing.
    pub fn load_cache(&self, path: &Path) -> Result<CacheLoad> {
        match std::fs::read_to_string(path) {
            Ok(text) => self.load_cache_json(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(CacheLoad::default()),
            Err(e) => Err(Error::Io(format!("{}: {e}", path.display()))),
        }
    }

    pub fn save_cache(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_cache_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}
