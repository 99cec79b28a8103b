use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spec::ExperimentSpec;
use crate::error::Result;
use crate::scalar::Precision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimVerdict {
    Supported,
    Contradicted,
    OutOfScope,
    Undecided,
}

impl std::fmt::Display for ClaimVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClaimVerdict::Supported => "supported",
            ClaimVerdict::Contradicted => "contradicted",
            ClaimVerdict::OutOfScope => "out_of_scope",
            ClaimVerdict::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimEntry {
    pub claim_id: String,
    pub claim_anchor: String,
    pub verdict: ClaimVerdict,
    /// File in the run directory holding the supporting table.
    pub evidence: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub name: String,
    pub index: u64,
    pub seed: u64,
}

/// Expands one master seed into named per-scenario seeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRegistry {
    pub master: u64,
    pub rule: String,
    pub entries: Vec<SeedEntry>,
}

impl SeedRegistry {
    pub fn new(master: u64) -> Self {
        Self {
            master,
            rule: "ChaCha8Rng::seed_from_u64(master), stream = index, first next_u64() >> 1".into(),
            entries: Vec::new(),
        }
    }

    /// Derived seeds stay below 2^63 so specs carrying them remain valid TOML.
    pub fn derive(master: u64, index: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(master);
        rng.set_stream(index);
        rng.next_u64() >> 1
    }

    /// Returns the seed for `name`, registering it on first use.
    pub fn seed_for(&mut self, name: &str) -> u64 {
        if let Some(e) = self.entries.iter().find(|e| e.name == name) {
            return e.seed;
        }
        let index = self.entries.len() as u64;
        let seed = Self::derive(self.master, index);
        self.entries.push(SeedEntry { name: name.to_string(), index, seed });
        seed
    }
}

/// Everything in the report except wall-clock data; identical inputs give
/// byte-identical bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub tool_version: String,
    pub precision: Precision,
    pub specs: Vec<ExperimentSpec>,
    pub claims: Vec<ClaimEntry>,
    pub seed_registry: SeedRegistry,
    /// Set when a hard error cut the run short.
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub body: ReportBody,
    pub timestamps: Timestamps,
}

pub(crate) fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

impl VerificationReport {
    pub fn claim(&self, id: &str) -> Option<&ClaimEntry> {
        self.body.claims.iter().find(|c| c.claim_id == id)
    }

    pub fn body_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.body)?)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
