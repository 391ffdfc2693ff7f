//! On-disk cache of convolution tables.
//!
//! One JSON file per `(type, u, v)`, carrying a schema version and a SHA-256
//! digest of the table. Anything that fails to validate is recomputed with a
//! warning. Writes go to a temporary file in the same directory and are
//! renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use loopk_core::conv::{ConvStats, Convolver, StructConstTable};
use loopk_core::laurent::LaurentPoly;
use loopk_core::weyl::{AffElem, WeylGroup};
use loopk_core::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct Entry {
    x: Vec<usize>,
    q: Vec<i32>,
    coeff: LaurentPoly,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    schema: u32,
    #[serde(rename = "type")]
    type_label: String,
    u: Vec<usize>,
    v: Vec<usize>,
    length_cap: usize,
    digest: String,
    stats: ConvStats,
    table: Vec<Entry>,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn digest(table: &[Entry]) -> String {
    let bytes = serde_json::to_vec(table).expect("table serializes");
    hex::encode(Sha256::digest(&bytes))
}

fn entries_of(g: &WeylGroup, t: &StructConstTable) -> Vec<Entry> {
    t.iter()
        .map(|(w, c)| Entry { x: g.word(w.x).to_vec(), q: w.q.coords().to_vec(), coeff: c.clone() })
        .collect()
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, conv: &Convolver, u: &AffElem, v: &AffElem) -> PathBuf {
        let g = conv.group();
        let label = g.root_system().cartan_type().to_string();
        let key = format!(
            "{label}|{}|{}|{}",
            WeylGroup::format_word(&g.reduced_word(u)),
            WeylGroup::format_word(&g.reduced_word(v)),
            conv.length_cap()
        );
        let h = hex::encode(Sha256::digest(key.as_bytes()));
        self.dir.join(format!("conv-{label}-{}.json", &h[..16]))
    }

    /// `Ok(None)` on a miss; `Err(reason)` when a file exists but is unusable.
    pub fn load(&self, conv: &Convolver, u: &AffElem, v: &AffElem) -> std::result::Result<Option<StructConstTable>, String> {
        let path = self.path_for(conv, u, v);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(format!("{}: {e}", path.display())),
        };
        let file: CacheFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let g = conv.group();
        if file.schema != SCHEMA_VERSION {
            return Err(format!("{}: schema {} is not {SCHEMA_VERSION}", path.display(), file.schema));
        }
        if file.type_label != g.root_system().cartan_type().to_string()
            || file.u != g.reduced_word(u)
            || file.v != g.reduced_word(v)
            || file.length_cap != conv.length_cap()
        {
            return Err(format!("{}: key mismatch", path.display()));
        }
        if digest(&file.table) != file.digest {
            return Err(format!("{}: digest mismatch", path.display()));
        }
        let mut entries = BTreeMap::new();
        for e in file.table {
            let x = g.from_word(&e.x).map_err(|err| format!("{}: {err}", path.display()))?;
            if e.q.len() != g.rank() {
                return Err(format!("{}: bad coroot vector", path.display()));
            }
            let w = AffElem { x, q: loopk_core::cartan::CorootVector::from_slice(&e.q) };
            if !g.is_minimal(&w) {
                return Err(format!("{}: label is not a minimal representative", path.display()));
            }
            entries.insert(w, e.coeff);
        }
        Ok(Some(StructConstTable::from_entries(entries, file.stats)))
    }

    pub fn store(&self, conv: &Convolver, u: &AffElem, v: &AffElem, table: &StructConstTable) -> std::io::Result<()> {
        let g = conv.group();
        fs::create_dir_all(&self.dir)?;
        let entries = entries_of(g, table);
        let file = CacheFile {
            schema: SCHEMA_VERSION,
            type_label: g.root_system().cartan_type().to_string(),
            u: g.reduced_word(u),
            v: g.reduced_word(v),
            length_cap: conv.length_cap(),
            digest: digest(&entries),
            stats: table.stats,
            table: entries,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer_pretty(&mut tmp, &file)?;
        tmp.write_all(b"\n")?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_for(conv, u, v)).map_err(|e| e.error)?;
        Ok(())
    }
}

/// Convolution through the cache: hits are returned as stored, corrupt
/// entries are reported through `warn` and recomputed, misses are computed
/// and written back.
pub fn convolve_cached(
    conv: &Convolver,
    cache: Option<&Cache>,
    u: &AffElem,
    v: &AffElem,
    warn: &mut dyn FnMut(String),
) -> Result<StructConstTable> {
    let Some(cache) = cache else {
        return conv.convolve(u, v);
    };
    match cache.load(conv, u, v) {
        Ok(Some(t)) => return Ok(t),
        Ok(None) => {}
        Err(reason) => warn(format!("ignoring cache entry ({reason}); recomputing")),
    }
    let t = conv.convolve(u, v)?;
    if let Err(e) = cache.store(conv, u, v, &t) {
        warn(format!("could not write cache entry: {e}"));
    }
    Ok(t)
}
