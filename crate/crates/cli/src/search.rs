//! Seeded random search. Trial `t` draws everything from
//! [`fkg_core::sample::trial_rng`]`(seed, t)`: the measure first, then the
//! data the check needs. Results are merged by trial index, so the worker
//! count never changes the report.

use std::sync::Arc;

use fkg_core::measure::{sample_log_supermodular, sample_unconstrained};
use fkg_core::sample::{random_fn_series, random_generators, trial_rng};
use fkg_core::{CouplingBounds, GroundSet, Mode};
use rayon::prelude::*;

use crate::checks::{self, InputError, Outcome};
use crate::config::{Check, RunConfig};
use crate::input::Case;

/// Largest weight drawn per subset by the unconstrained generator.
pub const UNCONSTRAINED_MAX_WEIGHT: u32 = 3;

pub fn generate_case(config: &RunConfig, trial: u64) -> Result<Case, InputError> {
    let ground = GroundSet::new(config.m).map_err(|e| InputError(format!("--m: {e}")))?;
    let mut rng = trial_rng(config.seed, trial);
    let measure = match config.mode {
        Mode::Verify => sample_log_supermodular(&mut rng, ground, &CouplingBounds::default())
            .map_err(|e| InputError(e.to_string()))?,
        Mode::Explore => sample_unconstrained(&mut rng, ground, UNCONSTRAINED_MAX_WEIGHT),
    };
    let mut case = Case {
        measure: Arc::new(measure),
        generators: None,
        lemma: None,
        series: None,
    };
    match config.check {
        Check::CheckFkg => {}
        Check::En | Check::Chain => {
            case.generators = Some(random_generators(&mut rng, ground, config.n));
        }
        Check::Lemma => {
            let g = random_generators(&mut rng, ground, 3);
            case.lemma = Some([g[0], g[1], g[2]]);
        }
        Check::SeriesIdentity | Check::SeriesNonneg => {
            let p = random_fn_series(&mut rng, ground, config.degree)
                .map_err(|e| InputError(format!("--degree: {e}")))?;
            case.series = Some(p);
        }
    }
    Ok(case)
}

/// Every trial's case and outcome, in trial order.
pub fn run_trials(config: &RunConfig) -> Result<Vec<(Case, Outcome)>, InputError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| InputError(format!("--workers: {e}")))?;
    pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let case = generate_case(config, t)?;
                let outcome = checks::evaluate(config.check, config.mode, &case)
                    .map_err(|e| InputError(format!("trial {t}: {}", e.0)))?;
                Ok((case, outcome))
            })
            .collect()
    })
}
