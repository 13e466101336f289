use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use fkg_core::{lattice::MAX_GROUND, partitions::MAX_N, series::MAX_DEGREE, Mode};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckFkg,
    En,
    Chain,
    Lemma,
    SeriesIdentity,
    SeriesNonneg,
    Search,
}

/// The checks `search` can drive; every command except `search` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    CheckFkg,
    En,
    Chain,
    Lemma,
    SeriesIdentity,
    SeriesNonneg,
}

impl Command {
    pub fn check(self) -> Option<Check> {
        Some(match self {
            Command::CheckFkg => Check::CheckFkg,
            Command::En => Check::En,
            Command::Chain => Check::Chain,
            Command::Lemma => Check::Lemma,
            Command::SeriesIdentity => Check::SeriesIdentity,
            Command::SeriesNonneg => Check::SeriesNonneg,
            Command::Search => return None,
        })
    }
}

/// Exact checks of FKG correlation inequalities on the Boolean lattice.
///
/// Exit status: 0 when every check passed (always in explore mode), 1 when an
/// inequality was violated, 2 on input or configuration errors.
#[derive(Debug, Clone, Parser)]
#[command(name = "fkg", version)]
pub struct RunConfig {
    pub command: Command,
    /// JSON file with one case or an array of cases.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Ground set size for generated instances.
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Number of functions for generated instances.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Series truncation degree.
    #[arg(long, default_value_t = fkg_core::series::DEFAULT_DEGREE)]
    pub degree: usize,
    #[arg(long, default_value = "verify")]
    pub mode: Mode,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Omit elapsed time so reports are byte-identical across runs.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Check run by `search`.
    #[arg(long, value_enum, default_value = "en")]
    pub check: Check,
}

/// Configuration errors, reported with the offending flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let range = |flag: &str, v: usize, lo: usize, hi: usize| {
            if (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError(format!("--{flag}: {v} outside {lo}..={hi}")))
            }
        };
        range("m", self.m, 1, MAX_GROUND)?;
        range("n", self.n, 1, MAX_N)?;
        range("degree", self.degree, 1, MAX_DEGREE)?;
        range("workers", self.workers, 1, 1024)?;
        match self.command {
            Command::Search => {
                if self.trials == 0 {
                    return Err(ConfigError("--trials: must be at least 1".into()));
                }
                if self.check == Check::SeriesIdentity {
                    range("degree", self.degree, 1, fkg_core::series::MAX_RHS_DEGREE)?;
                }
            }
            _ => {
                if self.input.is_none() {
                    return Err(ConfigError("--input: required for this command".into()));
                }
            }
        }
        Ok(())
    }
}
