//! Seeded instance generators.
//!
//! Trial `t` of a run seeded with `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `t`, so every trial has
//! its own reproducible sequence regardless of which worker evaluates it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lattice::{GroundSet, MonotoneComb, SubsetId};
use crate::rational;
use crate::series::FnSeries;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn random_generator<R: Rng>(rng: &mut R, ground: GroundSet) -> SubsetId {
    SubsetId(rng.gen_range(0..ground.size() as u32))
}

pub fn random_generators<R: Rng>(rng: &mut R, ground: GroundSet, n: usize) -> Vec<SubsetId> {
    (0..n).map(|_| random_generator(rng, ground)).collect()
}

/// Up to `max_terms` atoms with coefficients `p/q`, `p ∈ [0, 3]`, `q ∈ [1, 3]`.
pub fn random_comb<R: Rng>(rng: &mut R, ground: GroundSet, max_terms: usize) -> MonotoneComb {
    let k = rng.gen_range(0..=max_terms);
    let terms: Vec<_> = (0..k)
        .map(|_| {
            let p = rng.gen_range(0..=3);
            let q = rng.gen_range(1..=3);
            (rational::ratio(p, q), random_generator(rng, ground))
        })
        .collect();
    MonotoneComb::new(terms).expect("coefficients are nonnegative")
}

/// Cone-valued series; the linear coefficient carries at most two atoms and
/// the others at most one, which keeps the atom grids small at high degree.
pub fn random_fn_series<R: Rng>(rng: &mut R, ground: GroundSet, degree: usize) -> Result<FnSeries> {
    let coeffs = (1..=degree)
        .map(|d| random_comb(rng, ground, if d == 1 { 2 } else { 1 }))
        .collect();
    FnSeries::new(coeffs)
}
