//! Content-addressed result cache under `<out>/cache`.

use std::path::{Path, PathBuf};

use fillnorm::config::Caps;
use fillnorm::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::job::{Format, Plan, Verdict};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hash of everything that can change a report body.
pub fn key(plan: &Plan, fingerprint: &str, caps: &Caps, format: Format, timings: bool) -> String {
    let mut h = Sha256::new();
    h.update(format!("fillnorm {VERSION}\n"));
    h.update(serde_json::to_string(plan).expect("plan serializes"));
    h.update("\n");
    h.update(serde_json::to_string(caps).expect("caps serialize"));
    h.update(format!("\n{} {timings}\n", format.ext()));
    h.update(fingerprint);
    hex::encode(h.finalize())
}

#[derive(Serialize, Deserialize)]
pub struct Entry {
    pub verdict: Verdict,
    pub body: String,
}

fn path(out: &Path, key: &str) -> PathBuf {
    out.join("cache").join(format!("{key}.json"))
}

/// A readable entry for `key`, if any. Unreadable entries count as misses.
pub fn lookup(out: &Path, key: &str) -> Option<Entry> {
    let text = std::fs::read_to_string(path(out, key)).ok()?;
    serde_json::from_str(&text).ok()
}

pub fn store(out: &Path, key: &str, entry: &Entry) -> Result<()> {
    let p = path(out, key);
    let io = |e: std::io::Error| Error::InvalidInput(format!("cannot write {}: {e}", p.display()));
    std::fs::create_dir_all(p.parent().expect("cache dir")).map_err(io)?;
    let text = serde_json::to_string(entry).map_err(|e| Error::Internal(e.to_string()))?;
    std::fs::write(&p, text).map_err(io)
}
