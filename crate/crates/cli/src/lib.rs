//! Batch front end for `fkg-core`: loads instances or draws them from a seed,
//! runs one check on each and assembles a JSON report.

use std::time::Instant;

use fkg_core::Mode;

pub mod checks;
pub mod config;
pub mod input;
pub mod report;
pub mod search;

pub use config::{Check, Command, ConfigError, RunConfig};
pub use report::Report;

/// Every check passed, or exploration mode.
pub const EXIT_OK: u8 = 0;
/// An inequality failed in verification mode.
pub const EXIT_VIOLATION: u8 = 1;
/// Bad configuration or input.
pub const EXIT_INPUT: u8 = 2;

/// Validates `config`, runs it and returns the report with its exit status.
/// `Err` carries a one-line diagnostic; its exit status is [`EXIT_INPUT`].
pub fn run(config: &RunConfig) -> Result<(Report, u8), String> {
    config.validate().map_err(|e| e.0)?;
    let start = Instant::now();
    let mut results = Vec::new();
    let mut totals = report::Totals::default();
    let mut tally = |holds: bool, trivial: bool| {
        totals.cases += 1;
        if holds {
            totals.passed += 1;
        } else {
            totals.failed += 1;
        }
        if trivial {
            totals.trivial += 1;
        }
    };
    match config.command.check() {
        Some(check) => {
            let path = config.input.as_deref().expect("validated");
            for (i, case) in input::load(path)?.iter().enumerate() {
                let outcome = checks::evaluate(check, config.mode, case)
                    .map_err(|e| format!("input[{i}].{}", e.0))?;
                tally(outcome.holds, outcome.trivial);
                results.push(report::CaseResult {
                    index: i as u64,
                    holds: outcome.holds,
                    trivial: outcome.trivial,
                    instance: None,
                    report: outcome.report,
                });
            }
        }
        None => {
            let trials = search::run_trials(config).map_err(|e| e.0)?;
            for (t, (case, outcome)) in trials.into_iter().enumerate() {
                tally(outcome.holds, outcome.trivial);
                if !outcome.holds {
                    results.push(report::CaseResult {
                        index: t as u64,
                        holds: false,
                        trivial: outcome.trivial,
                        instance: Some(input::case_to_json(&case)),
                        report: outcome.report,
                    });
                }
            }
        }
    }
    let status = if config.mode == Mode::Verify && totals.failed > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    };
    let report = Report {
        command: config.command,
        config: config.into(),
        results,
        totals,
        elapsed_ms: (!config.no_timestamp).then(|| start.elapsed().as_millis() as u64),
    };
    Ok((report, status))
}
