//! One check on one case.

use fkg_core::functional::{self, Instance};
use fkg_core::{series, Error, Mode};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Check;
use crate::input::Case;

/// Largest ground set for which `lemma` without an explicit triple walks all
/// `8^m` generator triples.
pub const LEMMA_EXHAUSTIVE_MAX_M: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub holds: bool,
    /// Null-event short circuit (chain only).
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub trivial: bool,
    pub report: Value,
}

/// Errors that abort the run with status 2.
#[derive(Debug, Clone)]
pub struct InputError(pub String);

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn need<'a, T>(v: &'a Option<T>, field: &str) -> Result<&'a T, InputError> {
    v.as_ref()
        .ok_or_else(|| InputError(format!("{field}: missing (required by this check)")))
}

fn err(e: Error) -> InputError {
    InputError(e.to_string())
}

fn outcome<T: Serialize>(holds: bool, r: &T) -> Outcome {
    Outcome {
        holds,
        trivial: false,
        report: to_value(r),
    }
}

/// Verification preconditions: a failure here is an input error, not a
/// violation of the inequality under test.
fn require_fkg(check: Check, case: &Case) -> Result<(), InputError> {
    let needs = matches!(
        check,
        Check::En | Check::Chain | Check::Lemma | Check::SeriesNonneg
    );
    if needs {
        if let Some(w) = case.measure.check_fkg().witness {
            return Err(err(Error::NotFkg { a: w.a, b: w.b }).in_field("measure"));
        }
    }
    if check == Check::SeriesNonneg {
        if let Some(d) = need(&case.series, "series")?.first_outside_cone() {
            return Err(err(Error::OutsideCone(d)).in_field("series"));
        }
    }
    Ok(())
}

impl InputError {
    fn in_field(self, field: &str) -> Self {
        InputError(format!("{field}: {}", self.0))
    }
}

/// Runs `check` on `case`. In verification mode the hypotheses are checked
/// first and a failed inequality shows up as `holds == false`, with the full
/// report as witness.
pub fn evaluate(check: Check, mode: Mode, case: &Case) -> Result<Outcome, InputError> {
    if mode == Mode::Verify {
        require_fkg(check, case)?;
    }
    let mu = &case.measure;
    let instance = || -> Result<Instance, InputError> {
        let gens = need(&case.generators, "generators")?.clone();
        Instance::new(mu.clone(), gens).map_err(|e| err(e).in_field("generators"))
    };
    match check {
        Check::CheckFkg => {
            let r = mu.check_fkg();
            Ok(outcome(r.holds, &r))
        }
        Check::En => {
            let r = functional::evaluate_en(&instance()?, Mode::Explore).map_err(err)?;
            Ok(outcome(r.nonneg, &r))
        }
        Check::Chain => {
            let r = functional::verify_chain(&instance()?, Mode::Explore).map_err(err)?;
            Ok(Outcome {
                holds: r.holds(),
                trivial: r.trivially_terminated(),
                report: to_value(&r),
            })
        }
        Check::Lemma => lemma(case),
        Check::SeriesIdentity => {
            let r = series::verify_identity_e4(mu, need(&case.series, "series")?).map_err(err)?;
            Ok(outcome(r.equal, &r))
        }
        Check::SeriesNonneg => {
            let p = need(&case.series, "series")?;
            let r = series::check_nonneg_e2(mu, p, Mode::Explore).map_err(err)?;
            Ok(outcome(r.nonneg, &r))
        }
    }
}

fn lemma(case: &Case) -> Result<Outcome, InputError> {
    let mu = &case.measure;
    let run = |a, b, c| functional::lemma_check(mu, a, b, c).map_err(err);
    if let Some([a, b, c]) = case.lemma {
        let r = run(a, b, c)?;
        return Ok(outcome(r.holds(), &r));
    }
    let ground = mu.ground();
    if ground.m() > LEMMA_EXHAUSTIVE_MAX_M {
        return Err(InputError(format!(
            "lemma: missing, and m = {} is too large for the exhaustive sweep (max {})",
            ground.m(),
            LEMMA_EXHAUSTIVE_MAX_M
        )));
    }
    let mut triples = 0u64;
    let mut failures = Vec::new();
    for a in ground.subsets() {
        for b in ground.subsets() {
            for c in ground.subsets() {
                triples += 1;
                let r = run(a, b, c)?;
                if !r.holds() && failures.len() < 10 {
                    failures.push(r);
                }
            }
        }
    }
    Ok(Outcome {
        holds: failures.is_empty(),
        trivial: false,
        report: json!({ "triples": triples, "failures": to_value(&failures) }),
    })
}
