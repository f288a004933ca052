//! On-disk cache of the offline phase.
//!
//! The file holds two lines of JSON. The first is a header naming the format
//! version, a SHA-256 of the ratings data, every setting that influences
//! clustering, and a SHA-256 of the second line. The second line is the
//! `[fold][repetition]` grid of fitted cluster models.

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hybridrec::{ClusterModel, EvalProtocol, FoldSplit, RatingsMatrix};

const FORMAT: &str = "hybridrec-cluster-cache";
const VERSION: u32 = 1;

/// SHA-256 over the canonical `user\titem\trating\n` listing of the matrix.
pub fn data_checksum(matrix: &RatingsMatrix) -> String {
    let mut hasher = Sha256::new();
    for (u, i, r) in matrix.entries() {
        hasher.update(format!("{u}\t{i}\t{r}\n").as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Everything that must agree for cached models to be reusable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub data_sha256: String,
    pub clusters: usize,
    pub fuzzifier: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub folds: usize,
    pub repetitions: usize,
}

impl CacheKey {
    pub fn new(data_sha256: &str, protocol: &EvalProtocol) -> Self {
        CacheKey {
            data_sha256: data_sha256.to_string(),
            clusters: protocol.clustering.cluster_count,
            fuzzifier: protocol.clustering.fuzzifier,
            max_iterations: protocol.clustering.max_iterations,
            tolerance: protocol.clustering.tolerance,
            seed: protocol.seed,
            folds: protocol.folds,
            repetitions: protocol.repetitions,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    key: CacheKey,
    body_sha256: String,
}

pub fn store(path: &Path, key: &CacheKey, models: &[Vec<ClusterModel>]) -> Result<()> {
    let body = serde_json::to_string(models)?;
    let header = Header {
        format: FORMAT.to_string(),
        version: VERSION,
        key: key.clone(),
        body_sha256: hex::encode(Sha256::digest(body.as_bytes())),
    };
    let text = format!("{}\n{}\n", serde_json::to_string(&header)?, body);
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Loads cached models, failing if the header does not match `key` or the
/// models do not fit the given folds.
pub fn load(path: &Path, key: &CacheKey, folds: &[FoldSplit]) -> Result<Vec<Vec<ClusterModel>>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Header = serde_json::from_str(lines.next().context("missing header line")?)
        .context("malformed header")?;
    ensure!(header.format == FORMAT, "not a cluster cache file");
    ensure!(
        header.version == VERSION,
        "format version {} (expected {VERSION})",
        header.version
    );
    if header.key != *key {
        bail!("header does not match this run's data or clustering settings");
    }
    let body = lines.next().context("missing model body")?;
    ensure!(
        hex::encode(Sha256::digest(body.as_bytes())) == header.body_sha256,
        "body checksum mismatch"
    );
    let models: Vec<Vec<ClusterModel>> = serde_json::from_str(body).context("malformed body")?;
    ensure!(models.len() == folds.len(), "fold count mismatch");
    for (fold, fold_models) in folds.iter().zip(&models) {
        ensure!(
            fold_models.len() == key.repetitions,
            "repetition count mismatch"
        );
        ensure!(
            fold_models.iter().all(|m| m.matches(&fold.train)),
            "models do not match fold {}",
            fold.fold_index
        );
    }
    Ok(models)
}
