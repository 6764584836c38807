//! Machine-readable verification reports with a stable field order.
//! Timings are opt-in so that default reports are byte-identical across
//! runs with equal configuration and seed.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub items: Vec<ItemReport>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub degree_cap: u32,
    pub zero_degree_cap: u32,
    pub dim_degree_cap: u32,
    pub mode: String,
    pub seed: u64,
    pub trials: u32,
    pub params_note: String,
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ProvedConsequence,
    VerifiedSubstitutions,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct ItemReport {
    pub id: String,
    pub source: String,
    pub status: Status,
    pub instances: Vec<InstanceReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkipReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub instance: String,
    pub mode: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkipReport {
    pub instance: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub proved_consequence: usize,
    pub verified_substitutions: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn any_failed(&self) -> bool {
        self.summary.failed > 0
    }
}
