//! Probability measures on `2^[m]` with exact weights.
//!
//! A [`Measure`] stores its weight table together with the table of upset
//! probabilities `μ(⟨C⟩) = Σ_{A ⊇ C} μ(A)` for every generator `C`, filled by a
//! superset-sum (zeta) transform at construction. Event probabilities of
//! principal upsets, and therefore every `E_δ`, are table lookups afterwards.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GroundSet, MonotoneComb, SubsetId};
use crate::rational::{self, serde_q, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    ground: GroundSet,
    weights: Vec<Rational>,
    upset: Vec<Rational>,
}

/// Outcome of the lattice-condition check `μ(A∧B)μ(A∨B) ≥ μ(A)μ(B)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FkgReport {
    pub holds: bool,
    pub witness: Option<FkgWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FkgWitness {
    pub a: SubsetId,
    pub b: SubsetId,
    /// `μ(A∧B)·μ(A∨B)`
    #[serde(with = "serde_q")]
    pub lhs: Rational,
    /// `μ(A)·μ(B)`
    #[serde(with = "serde_q")]
    pub rhs: Rational,
}

fn superset_sums(ground: GroundSet, weights: &[Rational]) -> Vec<Rational> {
    let mut t = weights.to_vec();
    for i in 0..ground.m() {
        let bit = 1 << i;
        for s in 0..ground.size() {
            if s & bit == 0 {
                let hi = t[s | bit].clone();
                t[s] += hi;
            }
        }
    }
    t
}

impl Measure {
    /// Builds a measure from weights that already sum to one.
    pub fn from_weights(ground: GroundSet, weights: Vec<Rational>) -> Result<Self> {
        check_table(ground, &weights)?;
        let sum: Rational = weights.iter().sum();
        if !sum.is_one() {
            return Err(Error::WeightSum {
                sum: rational::format(&sum),
                deficit: rational::format(&(Rational::one() - &sum)),
            });
        }
        Ok(Self::from_parts(ground, weights))
    }

    fn from_parts(ground: GroundSet, weights: Vec<Rational>) -> Self {
        let upset = superset_sums(ground, &weights);
        Self {
            ground,
            weights,
            upset,
        }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, a: SubsetId) -> &Rational {
        &self.weights[a.0 as usize]
    }

    pub fn uniform(ground: GroundSet) -> Self {
        let w = Rational::new(1.into(), (ground.size() as i64).into());
        Self::from_parts(ground, vec![w; ground.size()])
    }

    pub fn point_mass(ground: GroundSet, at: SubsetId) -> Result<Self> {
        ground.check(at)?;
        let mut w = vec![Rational::zero(); ground.size()];
        w[at.0 as usize] = Rational::one();
        Ok(Self::from_parts(ground, w))
    }

    /// `μ(⟨gen⟩)`, the probability of the principal upset of `gen`.
    pub fn event_prob(&self, gen: SubsetId) -> &Rational {
        &self.upset[gen.0 as usize]
    }

    /// Upset probabilities for every generator, in index order.
    pub fn upset_table(&self) -> &[Rational] {
        &self.upset
    }

    /// `μ_C`: restriction to `⟨gen⟩`, renormalized.
    pub fn conditional(&self, gen: SubsetId) -> Result<Self> {
        self.ground.check(gen)?;
        let z = self.event_prob(gen).clone();
        if z.is_zero() {
            return Err(Error::NullEvent(gen));
        }
        let weights = self
            .ground
            .subsets()
            .map(|a| {
                if gen.is_subset_of(a) {
                    self.weight(a) / &z
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Ok(Self::from_parts(self.ground, weights))
    }

    /// `⟨f⟩_μ = Σ_j c_j μ(⟨C_j⟩)`.
    pub fn expectation(&self, f: &MonotoneComb) -> Rational {
        f.terms().map(|(c, g)| c * self.event_prob(g)).sum()
    }

    /// Checks `μ(A∧B)μ(A∨B) ≥ μ(A)μ(B)` over every unordered pair `A < B`
    /// (index order) and returns the first violating pair.
    pub fn check_fkg(&self) -> FkgReport {
        let n = self.ground.size() as u32;
        for a in 0..n {
            for b in a + 1..n {
                if a & b == a || a & b == b {
                    continue;
                }
                let (a, b) = (SubsetId(a), SubsetId(b));
                if let Some(w) = self.pair_violation(a, b) {
                    return FkgReport {
                        holds: false,
                        witness: Some(w),
                    };
                }
            }
        }
        FkgReport {
            holds: true,
            witness: None,
        }
    }

    fn pair_violation(&self, a: SubsetId, b: SubsetId) -> Option<FkgWitness> {
        let lhs = self.weight(a.meet(b)) * self.weight(a.join(b));
        let rhs = self.weight(a) * self.weight(b);
        (lhs < rhs).then_some(FkgWitness { a, b, lhs, rhs })
    }

    /// Local form of the lattice condition,
    /// `μ(A∪{i,j})μ(A) ≥ μ(A∪{i})μ(A∪{j})` for `i, j ∉ A`.
    ///
    /// Equivalent to [`Measure::check_fkg`] only when every weight is strictly
    /// positive; with zero weights the local condition can hold while the global
    /// one fails, so such measures are refused.
    pub fn check_fkg_local(&self) -> Result<FkgReport> {
        if let Some(a) = self.ground.subsets().find(|a| self.weight(*a).is_zero()) {
            return Err(Error::ZeroWeight(a.0));
        }
        let m = self.ground.m();
        for s in self.ground.subsets() {
            for i in 0..m {
                for j in i + 1..m {
                    let (bi, bj) = (1 << i, 1 << j);
                    if s.0 & (bi | bj) != 0 {
                        continue;
                    }
                    if let Some(w) = self.pair_violation(SubsetId(s.0 | bi), SubsetId(s.0 | bj)) {
                        return Ok(FkgReport {
                            holds: false,
                            witness: Some(w),
                        });
                    }
                }
            }
        }
        Ok(FkgReport {
            holds: true,
            witness: None,
        })
    }
}

fn check_table(ground: GroundSet, w: &[Rational]) -> Result<()> {
    if w.len() != ground.size() {
        return Err(Error::TableSize {
            got: w.len(),
            expected: ground.size(),
        });
    }
    if let Some((i, v)) = w.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(Error::NegativeWeight {
            subset: i as u32,
            value: rational::format(v),
        });
    }
    Ok(())
}

/// Divides a nonnegative table by its exact sum.
pub fn normalize(ground: GroundSet, raw: &[Rational]) -> Result<Measure> {
    check_table(ground, raw)?;
    let sum: Rational = raw.iter().sum();
    if sum.is_zero() {
        return Err(Error::DegenerateWeights);
    }
    Ok(Measure::from_parts(
        ground,
        raw.iter().map(|w| w / &sum).collect(),
    ))
}

pub fn check_fkg(mu: &Measure) -> FkgReport {
    mu.check_fkg()
}

pub fn event_prob(mu: &Measure, gen: SubsetId) -> Rational {
    mu.event_prob(gen).clone()
}

pub fn conditional(mu: &Measure, gen: SubsetId) -> Result<Measure> {
    mu.conditional(gen)
}

pub fn expectation(mu: &Measure, f: &MonotoneComb) -> Rational {
    mu.expectation(f)
}

/// Independent coordinates: `μ(A) = ∏_{i∈A} b_i ∏_{i∉A} (1 − b_i)`.
pub fn product_measure(biases: &[Rational]) -> Result<Measure> {
    let ground = GroundSet::new(biases.len())?;
    for (i, b) in biases.iter().enumerate() {
        if b.is_negative() || *b > Rational::one() {
            return Err(Error::BiasRange {
                index: i + 1,
                value: rational::format(b),
            });
        }
    }
    let weights = ground
        .subsets()
        .map(|a| {
            biases
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    if a.0 >> i & 1 == 1 {
                        b.clone()
                    } else {
                        Rational::one() - b
                    }
                })
                .product()
        })
        .collect();
    Ok(Measure::from_parts(ground, weights))
}

/// Pairwise log-supermodular weights
/// `w(A) = ∏_{i∈A} a_i · ∏_{{i,j}⊆A} b_{ij}`, normalized.
///
/// `couplings` lists `b_{ij}` for `i < j` in lexicographic order
/// (`b_12, b_13, ..., b_1m, b_23, ...`). Requires `a_i > 0` and `b_{ij} ≥ 1`.
pub fn log_supermodular(
    ground: GroundSet,
    singletons: &[Rational],
    couplings: &[Rational],
) -> Result<Measure> {
    let m = ground.m();
    if singletons.len() != m || couplings.len() != m * (m - 1) / 2 {
        return Err(Error::Couplings(format!(
            "expected {} singleton weights and {} couplings, got {} and {}",
            m,
            m * (m - 1) / 2,
            singletons.len(),
            couplings.len()
        )));
    }
    if let Some(a) = singletons.iter().find(|a| !a.is_positive()) {
        return Err(Error::Couplings(format!(
            "singleton weight {} not positive",
            rational::format(a)
        )));
    }
    if let Some(b) = couplings.iter().find(|b| **b < Rational::one()) {
        return Err(Error::Couplings(format!(
            "coupling {} below 1",
            rational::format(b)
        )));
    }
    let mut pairs = Vec::with_capacity(couplings.len());
    for i in 0..m {
        for j in i + 1..m {
            pairs.push((1u32 << i) | (1u32 << j));
        }
    }
    let raw: Vec<Rational> = ground
        .subsets()
        .map(|a| {
            let single: Rational = singletons
                .iter()
                .enumerate()
                .filter(|(i, _)| a.0 >> i & 1 == 1)
                .map(|(_, w)| w.clone())
                .product();
            let pair: Rational = pairs
                .iter()
                .zip(couplings)
                .filter(|(p, _)| a.0 & **p == **p)
                .map(|(_, b)| b.clone())
                .product();
            single * pair
        })
        .collect();
    normalize(ground, &raw)
}

/// Bounds for the integer-based draw in [`random_log_supermodular`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingBounds {
    /// Singleton weights are `p/q` with `p ∈ [1, max_num]`, `q ∈ [1, max_den]`.
    pub max_num: u32,
    pub max_den: u32,
    /// Couplings are `1 + u/v` with `u ∈ [0, max_coupling]`, `v ∈ [1, max_den]`.
    pub max_coupling: u32,
}

impl Default for CouplingBounds {
    fn default() -> Self {
        Self {
            max_num: 4,
            max_den: 4,
            max_coupling: 3,
        }
    }
}

fn draw_ratio<R: Rng>(rng: &mut R, num: std::ops::RangeInclusive<u32>, max_den: u32) -> Rational {
    let p = rng.gen_range(num);
    let q = rng.gen_range(1..=max_den.max(1));
    rational::ratio(p as i64, q as i64)
}

/// Draws a pairwise log-supermodular measure from `rng`: singleton weights
/// `a_1..a_m` first, then couplings in lexicographic pair order, each as a
/// numerator draw followed by a denominator draw.
pub fn sample_log_supermodular<R: Rng>(
    rng: &mut R,
    ground: GroundSet,
    bounds: &CouplingBounds,
) -> Result<Measure> {
    let m = ground.m();
    let singletons: Vec<_> = (0..m)
        .map(|_| draw_ratio(rng, 1..=bounds.max_num.max(1), bounds.max_den))
        .collect();
    let couplings: Vec<_> = (0..m * (m - 1) / 2)
        .map(|_| Rational::one() + draw_ratio(rng, 0..=bounds.max_coupling, bounds.max_den))
        .collect();
    let mu = log_supermodular(ground, &singletons, &couplings)?;
    if let Some(w) = mu.check_fkg().witness {
        return Err(Error::Internal(format!(
            "log-supermodular generator produced a measure failing FKG at ({}, {})",
            w.a, w.b
        )));
    }
    Ok(mu)
}

/// Seeded form of [`sample_log_supermodular`] using `ChaCha8Rng::seed_from_u64`.
pub fn random_log_supermodular(
    seed: u64,
    ground: GroundSet,
    bounds: &CouplingBounds,
) -> Result<Measure> {
    sample_log_supermodular(&mut ChaCha8Rng::seed_from_u64(seed), ground, bounds)
}

/// Unconstrained measure: integer weights in `[0, max_weight]` per subset,
/// normalized. If every draw is zero the empty set gets weight one. Used for
/// negative controls; the result need not satisfy FKG.
pub fn sample_unconstrained<R: Rng>(rng: &mut R, ground: GroundSet, max_weight: u32) -> Measure {
    let mut raw: Vec<Rational> = (0..ground.size())
        .map(|_| rational::int(rng.gen_range(0..=max_weight) as i64))
        .collect();
    if raw.iter().all(Zero::is_zero) {
        raw[0] = Rational::one();
    }
    normalize(ground, &raw).expect("table has a positive entry")
}
