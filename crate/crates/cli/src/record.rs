use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// What was run, on what, producing what.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    /// Input name (path, `builtin:NAME` or `-`) to SHA-256.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub version: &'static str,
    pub wall_time_ms: u128,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
