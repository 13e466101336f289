//! Exact-arithmetic checks of correlation inequalities on the Boolean lattice
//! `2^[m]`.
//!
//! * [`lattice`]: subsets, principal upsets and the cone of nonnegative
//!   combinations of their indicators.
//! * [`measure`]: probability measures, the FKG lattice condition,
//!   conditionals and instance generators.
//! * [`partitions`]: set partitions of `[n]`, shapes and `c_λ`.
//! * [`functional`]: `E_δ`, `E_σ`, `E_λ`, `E_n`, the interpolation family
//!   `E^k`/`I^k`, the recursive descent and the conditional correlation check.
//! * [`series`]: truncated formal power series and the identity
//!   `1 − ∏_A (1 − p(A))^{μ(A)} = Σ_n E_n(p, ..., p)/n!`.
//!
//! Every scalar is a [`Rational`]; no floating point is involved.
//!
//! ```
//! use fkg_core::{functional, GroundSet, Instance, Measure, Mode, SubsetId};
//!
//! # fn main() -> fkg_core::Result<()> {
//! let mu = Measure::uniform(GroundSet::new(3)?);
//! let gens = vec![
//!     SubsetId::from_elements(&[1]),
//!     SubsetId::from_elements(&[1, 2]),
//!     SubsetId::from_elements(&[2, 3]),
//! ];
//! let inst = Instance::new(mu, gens)?;
//! assert_eq!(inst.e_n().to_string(), "1/8");
//! assert!(functional::verify_chain(&inst, Mode::Verify)?.holds());
//! # Ok(())
//! # }
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod error;
pub mod formats;
pub mod functional;
pub mod lattice;
pub mod measure;
pub mod partitions;
pub mod rational;
pub mod sample;
pub mod series;

pub use error::{Error, Result};
pub use functional::{lemma_check, verify_chain, ChainReport, Instance, LemmaReport};
pub use lattice::{GroundSet, MonotoneComb, SubsetId, UnimodalFn};
pub use measure::{CouplingBounds, FkgReport, Measure};
pub use partitions::{IntPartition, SetPartition};
pub use rational::Rational;
pub use series::{FnSeries, ScalarSeries};

/// Verification asserts the inequalities under their hypotheses and fails on
/// a violation; exploration only reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Verify,
    Explore,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "verify" => Ok(Mode::Verify),
            "explore" => Ok(Mode::Explore),
            other => Err(format!(
                "unknown mode {other:?} (expected verify or explore)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Verify => "verify",
            Mode::Explore => "explore",
        })
    }
}
