use std::path::PathBuf;

use fkg_core::Mode;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Check, Command, RunConfig};

/// The configuration fields that determine a report. The worker count and
/// output path are left out so they cannot change the report bytes.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub seed: u64,
    pub trials: u64,
    pub m: usize,
    pub n: usize,
    pub degree: usize,
    pub mode: Mode,
    pub check: Check,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        Self {
            input: c.input.clone(),
            seed: c.seed,
            trials: c.trials,
            m: c.m,
            n: c.n,
            degree: c.degree,
            mode: c.mode,
            check: c.command.check().unwrap_or(c.check),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    /// Position in the input file, or the trial index for `search`.
    pub index: u64,
    pub holds: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub trivial: bool,
    /// The generated instance (`search` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Value>,
    pub report: Value,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub cases: u64,
    pub passed: u64,
    pub failed: u64,
    /// Chains cut short by conditioning on a null event.
    pub trivial: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Command,
    pub config: ConfigEcho,
    /// Every case for file input; only failing trials for `search`.
    pub results: Vec<CaseResult>,
    pub totals: Totals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
