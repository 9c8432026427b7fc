//! Census cache files: `census-{stratum}-{n}.jsonl` plus a manifest sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Census, CensusRecord};
use crate::error::{Error, Result};
use crate::origami::Stratum;

pub const ENUMERATOR_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub enumerator_version: String,
    pub tool_version: String,
    pub complete: bool,
    pub stratum: Stratum,
    pub n: usize,
    pub record_count: usize,
    pub sha256: String,
    pub config: serde_json::Value,
}

pub fn records_path(dir: &Path, stratum: Stratum, n: usize) -> PathBuf {
    dir.join(format!("census-{stratum}-{n}.jsonl"))
}

pub fn manifest_path(dir: &Path, stratum: Stratum, n: usize) -> PathBuf {
    dir.join(format!("census-{stratum}-{n}.manifest.json"))
}

fn encode(records: &[CensusRecord]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.push(b'\n');
    }
    Ok(out)
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes the records file and then the manifest, so a manifest marked
/// complete always describes a fully written records file.
pub fn write_census(dir: &Path, census: &Census, config: serde_json::Value) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let bytes = encode(&census.records)?;
    fs::write(records_path(dir, census.stratum, census.n), &bytes)?;
    let manifest = Manifest {
        enumerator_version: ENUMERATOR_VERSION.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        complete: true,
        stratum: census.stratum,
        n: census.n,
        record_count: census.records.len(),
        sha256: digest(&bytes),
        config,
    };
    let mut f = fs::File::create(manifest_path(dir, census.stratum, census.n))?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n")?;
    Ok(manifest)
}

/// Reads a cached census. Returns `Ok(None)` if no cache exists and an error
/// if the cache is incomplete, stale, or does not match its manifest.
pub fn load_census(dir: &Path, stratum: Stratum, n: usize) -> Result<Option<Census>> {
    let rpath = records_path(dir, stratum, n);
    let mpath = manifest_path(dir, stratum, n);
    if !rpath.exists() && !mpath.exists() {
        return Ok(None);
    }
    let corrupt = |path: &Path, reason: String| Error::CorruptCache {
        path: path.display().to_string(),
        reason,
    };
    let mtext = fs::read_to_string(&mpath).map_err(|e| corrupt(&mpath, e.to_string()))?;
    let manifest: Manifest = serde_json::from_str(&mtext).map_err(|e| corrupt(&mpath, e.to_string()))?;
    if !manifest.complete {
        return Err(corrupt(&mpath, "census marked incomplete".into()));
    }
    if manifest.enumerator_version != ENUMERATOR_VERSION {
        return Err(corrupt(
            &mpath,
            format!("enumerator version {} is stale", manifest.enumerator_version),
        ));
    }
    if manifest.stratum != stratum || manifest.n != n {
        return Err(corrupt(&mpath, "manifest describes a different census".into()));
    }
    let bytes = fs::read(&rpath).map_err(|e| corrupt(&rpath, e.to_string()))?;
    if digest(&bytes) != manifest.sha256 {
        return Err(corrupt(&rpath, "checksum mismatch".into()));
    }
    let mut records = Vec::with_capacity(manifest.record_count);
    for (lineno, line) in bytes.split(|&b| b == b'\n').enumerate() {
        if line.is_empty() {
            continue;
        }
        let r: CensusRecord =
            serde_json::from_slice(line).map_err(|e| corrupt(&rpath, format!("line {}: {e}", lineno + 1)))?;
        let o = r
            .origami()
            .map_err(|e| corrupt(&rpath, format!("line {}: {e}", lineno + 1)))?;
        if r.n != n || r.stratum != stratum || o.canonical_form() != o {
            return Err(corrupt(&rpath, format!("line {}: not a canonical record", lineno + 1)));
        }
        records.push(r);
    }
    if records.len() != manifest.record_count {
        return Err(corrupt(&rpath, "record count mismatch".into()));
    }
    Ok(Some(Census { n, stratum, records }))
}
