//! Count results and run metadata.

use num_bigint::BigUint;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Exact,
    Approx,
    Bruteforce,
    Filter,
}

/// Search counters. Elapsed time is tracked separately by the CLI report so
/// that JSON output stays byte-stable across runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub decisions: u64,
    pub propagations: u64,
    pub copy_rejections: u64,
}

/// Per-round telemetry of the approximate counter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundInfo {
    pub round: u32,
    pub m: u32,
    pub cell_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxMeta {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub thresh: u64,
    pub rounds: u32,
    /// m of the last completed round (0 when the m=0 short circuit fired).
    pub final_m: u32,
    pub cells: Vec<RoundInfo>,
}

/// Outcome of a counting run. The count is arbitrary precision and renders
/// as a decimal string in JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub count: BigUint,
    pub mode: CountMode,
    pub stats: SearchStats,
    pub approx: Option<ApproxMeta>,
}

impl Serialize for CountResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CountResult", 4)?;
        s.serialize_field("count", &self.count.to_string())?;
        s.serialize_field("mode", &self.mode)?;
        s.serialize_field("stats", &self.stats)?;
        s.serialize_field("approx", &self.approx)?;
        s.end()
    }
}

impl CountResult {
    pub fn new(count: BigUint, mode: CountMode) -> Self {
        CountResult {
            count,
            mode,
            stats: SearchStats::default(),
            approx: None,
        }
    }
}
