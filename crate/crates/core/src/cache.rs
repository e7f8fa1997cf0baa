//! Stage caches: versioned on-disk formats keyed by content hashes.
//!
//! The feature cache stores one dataset's feature matrix as a magic
//! line, a JSON header (descriptor table, labels, normalization state,
//! origins), and a row-major little-endian f64 payload. Stage outputs
//! (selections, cells) are JSON files wrapped with the same versioned
//! envelope and an input hash, so a stage can tell a clean cache hit
//! from a stale one.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluation::DatasetInput;
use crate::features::{FeatureDescriptor, FeatureMatrix, Normalization};

pub const FEATURE_CACHE_MAGIC: &str = "BCIBENCH-FEATCACHE v1";
pub const STAGE_CACHE_MAGIC: &str = "bcibench-stage-v1";

/// Hex SHA-256 of a byte stream.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of a serializable value via its canonical JSON encoding.
pub fn hash_of<T: Serialize>(value: &T) -> Result<String> {
    Ok(content_hash(serde_json::to_string(value)?.as_bytes()))
}

/// Hash of a file's raw bytes.
pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(content_hash(&bytes))
}

/// Write-temp-then-rename so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("cache"),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.flush().map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct FeatureHeader {
    /// Hash of (source data, preprocessing config, feature config).
    input_hash: String,
    dataset_id: String,
    n_rows: usize,
    n_cols: usize,
    labels: Vec<u32>,
    descriptors: Vec<FeatureDescriptor>,
    normalization: Normalization,
    degenerate_cells: usize,
    origins: Vec<(usize, usize)>,
    window_len: usize,
}

/// Persist one dataset's features. `input_hash` keys the cache.
pub fn save_feature_cache(path: &Path, input: &DatasetInput, input_hash: &str) -> Result<()> {
    let header = FeatureHeader {
        input_hash: input_hash.to_string(),
        dataset_id: input.id.clone(),
        n_rows: input.matrix.n_rows,
        n_cols: input.matrix.n_cols,
        labels: input.matrix.labels.clone(),
        descriptors: input.matrix.descriptors.clone(),
        normalization: input.matrix.normalization.clone(),
        degenerate_cells: input.matrix.degenerate_cells,
        origins: input.origins.clone(),
        window_len: input.window_len,
    };
    let mut bytes = Vec::new();
    bytes.extend_from_slice(FEATURE_CACHE_MAGIC.as_bytes());
    bytes.push(b'\n');
    bytes.extend_from_slice(serde_json::to_string(&header)?.as_bytes());
    bytes.push(b'\n');
    for v in &input.matrix.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &bytes)
}

/// Load a cached feature matrix, verifying the magic line. Returns the
/// dataset and the input hash it was built from.
pub fn load_feature_cache(path: &Path) -> Result<(DatasetInput, String)> {
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;

    let magic_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad_version(path, "missing magic line"))?;
    let magic = std::str::from_utf8(&bytes[..magic_end])
        .map_err(|_| bad_version(path, "non-text magic line"))?;
    if magic != FEATURE_CACHE_MAGIC {
        return Err(Error::CacheVersion {
            path: path.to_path_buf(),
            found: magic.chars().take(40).collect(),
            expected: FEATURE_CACHE_MAGIC.to_string(),
        });
    }
    let header_end = bytes[magic_end + 1..]
        .iter()
        .position(|&b| b == b'\n')
        .map(|p| magic_end + 1 + p)
        .ok_or_else(|| bad_version(path, "missing header line"))?;
    let header: FeatureHeader = serde_json::from_slice(&bytes[magic_end + 1..header_end])?;

    let payload = &bytes[header_end + 1..];
    let expect = header.n_rows * header.n_cols * 8;
    if payload.len() != expect {
        return Err(Error::structural(format!(
            "feature cache payload is {} bytes, expected {expect}",
            payload.len()
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let matrix = FeatureMatrix {
        values,
        n_rows: header.n_rows,
        n_cols: header.n_cols,
        descriptors: header.descriptors,
        labels: header.labels,
        normalization: header.normalization,
        degenerate_cells: header.degenerate_cells,
    };
    Ok((
        DatasetInput {
            id: header.dataset_id,
            matrix,
            origins: header.origins,
            window_len: header.window_len,
        },
        header.input_hash,
    ))
}

fn bad_version(path: &Path, what: &str) -> Error {
    Error::CacheVersion {
        path: path.to_path_buf(),
        found: what.to_string(),
        expected: FEATURE_CACHE_MAGIC.to_string(),
    }
}

#[derive(Serialize, Deserialize)]
struct StageEnvelope<T> {
    magic: String,
    input_hash: String,
    payload: T,
}

/// Save a JSON stage artifact with version + input-hash envelope.
pub fn save_stage<T: Serialize>(path: &Path, input_hash: &str, payload: &T) -> Result<()> {
    let envelope = StageEnvelope {
        magic: STAGE_CACHE_MAGIC.to_string(),
        input_hash: input_hash.to_string(),
        payload,
    };
    write_atomic(path, serde_json::to_string_pretty(&envelope)?.as_bytes())
}

/// Load a stage artifact; `Ok(None)` when the file is absent, an error
/// when it exists but carries a wrong version, and the payload plus its
/// recorded input hash otherwise.
pub fn load_stage<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Option<(T, String)>> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(path, e)),
    };
    let envelope: StageEnvelope<T> = serde_json::from_slice(&bytes).map_err(|_| {
        Error::CacheVersion {
            path: path.to_path_buf(),
            found: "unparseable stage file".to_string(),
            expected: STAGE_CACHE_MAGIC.to_string(),
        }
    })?;
    if envelope.magic != STAGE_CACHE_MAGIC {
        return Err(Error::CacheVersion {
            path: path.to_path_buf(),
            found: envelope.magic,
            expected: STAGE_CACHE_MAGIC.to_string(),
        });
    }
    Ok(Some((envelope.payload, envelope.input_hash)))
}

pub fn cache_file_name(kind: &str, id: &str, hash: &str) -> PathBuf {
    PathBuf::from(format!("{kind}_{id}_{}.cache", &hash[..16.min(hash.len())]))
}
