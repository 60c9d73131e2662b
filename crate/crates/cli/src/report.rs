//! The compile report.

use std::collections::BTreeMap;

use redgreen::measurement::{CellReport, OutcomeSource};
use redgreen::semantics::ScalarEquivalence;
use redgreen::Diagram;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::recognize::Recognition;

/// Written in place of a gate name when nothing matched.
pub const UNRECOGNIZED: &str = "unrecognized";

/// Size of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub vertices: usize,
    pub spiders: usize,
    pub hadamards: usize,
    pub boundaries: usize,
    pub edges: usize,
}

impl Counts {
    pub fn of(d: &Diagram) -> Counts {
        Counts {
            vertices: d.vertex_count(),
            spiders: d.spider_count(),
            hadamards: d.hadamard_count(),
            boundaries: d.inputs().len() + d.outputs().len(),
            edges: d.edge_count(),
        }
    }
}

/// Tensor comparison with the recognised gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub equivalent: bool,
    /// `[re, im]` of `s` in `diagram ≈ s · reference`.
    pub scalar: Option<[f64; 2]>,
    pub residual: f64,
}

impl From<ScalarEquivalence> for Verdict {
    fn from(r: ScalarEquivalence) -> Self {
        Verdict { equivalent: r.equivalent, scalar: r.scalar.map(|s| [s.re, s.im]), residual: r.max_residual }
    }
}

/// One run of a seed sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub seed: u64,
    pub recognized: String,
    pub minus_outcomes: usize,
    pub parity_violations: usize,
    pub logical_hash: String,
}

/// Everything `compile` reports.  All fields except `wall_time_ms` are a
/// function of the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    /// SHA-256 of the pattern file's bytes.
    pub input_digest: String,
    pub convention: String,
    pub outcomes: OutcomeSource,
    pub sites: usize,
    pub minus_outcomes: usize,
    /// The unmeasured cluster.
    pub counts_before: Counts,
    /// The normal form of the measured process.
    pub counts_after: Counts,
    /// The regrouped logical process.
    pub logical_counts: Counts,
    pub trace_length: usize,
    pub normal_form_hash: String,
    pub logical_hash: String,
    /// A gate name or [`UNRECOGNIZED`].
    pub recognized: String,
    pub recognition: Option<Recognition>,
    /// Absent when nothing was recognised or the rank cap was hit.
    pub verdict: Option<Verdict>,
    pub parity_violations: Vec<CellReport>,
    pub sweep: Vec<SweepEntry>,
    /// Files written, by kind.
    pub artifacts: BTreeMap<String, String>,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

/// Lowercase hex SHA-256.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
