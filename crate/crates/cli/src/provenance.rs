use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: Option<u64>,
    /// SHA-256 of the model file bytes.
    pub model_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(command: &'static str, model_bytes: &[u8], seed: Option<u64>, deterministic: bool) -> Self {
        let timestamp = (!deterministic)
            .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
        Provenance {
            tool: "crsm",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            model_hash: hex::encode(Sha256::digest(model_bytes)),
            timestamp,
        }
    }
}
