use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::csv_out::write_json;
use crate::error::Result;
use crate::solver::{RegimeFlags, Termination};

/// Provenance of one invocation; written even when the run aborts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the config file bytes.
    pub config_hash: String,
    pub code_version: String,
    /// Wall-clock seconds since the Unix epoch.
    pub start_time: f64,
    pub end_time: Option<f64>,
    pub regime: Option<RegimeFlags>,
    pub termination: Termination,
    pub message: Option<String>,
    /// Set when the invocation failed for a reason other than the solver,
    /// e.g. an unwritable output file.
    pub error: Option<String>,
    pub steps: usize,
}

pub fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn hash_config(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn start(command: &str, config_bytes: &[u8]) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config_hash: hash_config(config_bytes),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            start_time: now(),
            end_time: None,
            regime: None,
            termination: Termination::Completed,
            message: None,
            error: None,
            steps: 0,
        }
    }

    pub fn finish(&mut self, termination: Termination, message: Option<String>) {
        self.end_time = Some(now());
        self.termination = termination;
        self.message = message;
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(self, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_sha256_hex() {
        assert_eq!(hash_config(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let mut m = RunManifest::start("run", b"[solver]\n");
        m.finish(Termination::Blowup, Some("blow-up at t = 1".into()));
        m.steps = 7;
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(back.end_time.unwrap() >= back.start_time);
    }
}
