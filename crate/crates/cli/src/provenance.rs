use serde::Serialize;
use sha2::{Digest, Sha256};

/// Identifies the configuration that produced an output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// First 16 hex digits of the SHA-256 of the canonical JSON config.
    pub config_hash: String,
    pub seed: u64,
}

pub fn config_hash<T: Serialize>(config: &T) -> String {
    // serde_json writes struct fields in declaration order, so this is stable
    let bytes = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&bytes).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl Provenance {
    pub fn new<T: Serialize>(command: &str, config: &T, seed: u64) -> Self {
        Self {
            tool: "mfdepth".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: config_hash(config),
            seed,
        }
    }

    /// Single-line form used in CSV and SVG comments.
    pub fn comment(&self) -> String {
        format!(
            "{} {} {} config_hash={} seed={}",
            self.tool, self.version, self.command, self.config_hash, self.seed
        )
    }
}
