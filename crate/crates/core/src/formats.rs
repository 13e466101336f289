//! JSON interchange formats. Rationals are always `"p/q"` strings and
//! subsets are their characteristic index.
//!
//! ```text
//! Measure   {"m": 2, "weights": ["1/4", "1/4", "1/4", "1/4"]}
//! Comb      [{"coef": "1/2", "gen": 1}, {"coef": "1/3", "gen": 2}]
//! Instance  {"measure": <Measure>, "generators": [1, 2, 4]}
//! FnSeries  {"D": 3, "coeffs": [<Comb>, <Comb>, <Comb>]}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::Instance;
use crate::lattice::{GroundSet, MonotoneComb, SubsetId};
use crate::measure::Measure;
use crate::rational;
use crate::series::FnSeries;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub m: usize,
    pub weights: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef: String,
    pub gen: u32,
}

pub type CombJson = Vec<TermJson>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub measure: MeasureJson,
    pub generators: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnSeriesJson {
    #[serde(rename = "D")]
    pub degree: usize,
    pub coeffs: Vec<CombJson>,
}

impl MeasureJson {
    /// Rejects malformed rationals, negative weights and sums other than one,
    /// naming the exact deficit in the last case.
    pub fn to_measure(&self) -> Result<Measure> {
        let ground = GroundSet::new(self.m).map_err(|e| e.in_field("m"))?;
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| rational::parse(w).map_err(|e| e.in_field(format!("weights[{i}]"))))
            .collect::<Result<Vec<_>>>()?;
        Measure::from_weights(ground, weights).map_err(|e| e.in_field("weights"))
    }

    pub fn from_measure(mu: &Measure) -> Self {
        Self {
            m: mu.ground().m(),
            weights: mu.weights().iter().map(rational::format).collect(),
        }
    }
}

/// Parses a combination; coefficients of either sign are accepted here and
/// the cone requirement is enforced by the verification entry points.
pub fn comb_from_json(terms: &[TermJson], ground: GroundSet) -> Result<MonotoneComb> {
    let terms = terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let c = rational::parse(&t.coef).map_err(|e| e.in_field(format!("[{i}].coef")))?;
            let g = ground
                .check(SubsetId(t.gen))
                .map_err(|e| e.in_field(format!("[{i}].gen")))?;
            Ok((c, g))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotoneComb::signed(terms))
}

pub fn comb_to_json(f: &MonotoneComb) -> CombJson {
    f.terms()
        .map(|(c, g)| TermJson {
            coef: rational::format(c),
            gen: g.0,
        })
        .collect()
}

impl InstanceJson {
    pub fn to_instance(&self) -> Result<Instance> {
        let mu = self
            .measure
            .to_measure()
            .map_err(|e| e.in_field("measure"))?;
        let ground = mu.ground();
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                ground
                    .check(SubsetId(g))
                    .map_err(|e| e.in_field(format!("generators[{i}]")))
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(mu, gens).map_err(|e| e.in_field("generators"))
    }

    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            measure: MeasureJson::from_measure(inst.measure()),
            generators: inst.generators().iter().map(|g| g.0).collect(),
        }
    }
}

impl FnSeriesJson {
    pub fn to_series(&self, ground: GroundSet) -> Result<FnSeries> {
        if self.coeffs.len() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, self.coeffs.len()).in_field("coeffs"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| comb_from_json(c, ground).map_err(|e| e.in_field(format!("coeffs[{i}]"))))
            .collect::<Result<Vec<_>>>()?;
        FnSeries::new(coeffs).map_err(|e| e.in_field("D"))
    }

    pub fn from_series(p: &FnSeries) -> Self {
        Self {
            degree: p.degree(),
            coeffs: p.coeffs().iter().map(comb_to_json).collect(),
        }
    }
}
