//! Set partitions of `[n]`, their shapes `λ ⊢ n`, the signed coefficients
//! `c_λ = (−1)^{ℓ+1} ∏ (λ_i − 1)!` and the shape multiplicities
//! `n! / ∏_i (i!)^{q_i} q_i!`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{factorial, Rational};

pub const MAX_N: usize = 8;

/// A partition of `[n]` into nonempty blocks. Elements are 1-based, sorted
/// within each block, and blocks are ordered by their minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates disjointness and cover of `[n]`, then canonicalizes.
    pub fn from_blocks(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n + 1];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidSetPartition("empty block".into()));
            }
            b.sort_unstable();
            for &e in b.iter() {
                if e == 0 || e > n {
                    return Err(Error::InvalidSetPartition(format!(
                        "element {e} outside [{n}]"
                    )));
                }
                if std::mem::replace(&mut seen[e], true) {
                    return Err(Error::InvalidSetPartition(format!("element {e} repeated")));
                }
            }
        }
        if n == 0 {
            return Err(Error::InvalidSetPartition("no elements".into()));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// From a restricted growth string `a_1 a_2 ... a_n` (`a_1 = 0`,
    /// `a_{i+1} ≤ 1 + max(a_1..a_i)`).
    pub fn from_rgs(rgs: &[u8]) -> Self {
        let k = rgs.iter().max().map_or(0, |&m| m as usize + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b as usize].push(i + 1);
        }
        Self {
            n: rgs.len(),
            blocks,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks `ℓ`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as bit masks over `[n]`, element `i` at bit `i − 1`.
    pub fn block_masks(&self) -> Vec<u16> {
        self.blocks
            .iter()
            .map(|b| b.iter().fold(0u16, |m, &e| m | 1 << (e - 1)))
            .collect()
    }

    pub fn shape(&self) -> IntPartition {
        IntPartition::from_unsorted(self.blocks.iter().map(Vec::len).collect())
    }

    /// The block containing `e`.
    pub fn block_of(&self, e: usize) -> Result<&[usize]> {
        self.blocks
            .iter()
            .find(|b| b.contains(&e))
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                index: e,
                n: self.n,
            })
    }
}

impl TryFrom<Vec<Vec<usize>>> for SetPartition {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_blocks(blocks)
    }
}

impl From<SetPartition> for Vec<Vec<usize>> {
    fn from(p: SetPartition) -> Self {
        p.blocks
    }
}

pub fn shape(sigma: &SetPartition) -> IntPartition {
    sigma.shape()
}

pub fn block_of(sigma: &SetPartition, e: usize) -> Result<&[usize]> {
    sigma.block_of(e)
}

/// Streams the set partitions of `[n]` in restricted-growth-string
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<u8>,
    // prefix maxima: max[i] = max(rgs[0..=i])
    max: Vec<u8>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let out = SetPartition::from_rgs(&self.rgs);
        let n = self.rgs.len();
        // rightmost position that can still grow
        match (1..n).rev().find(|&i| self.rgs[i] <= self.max[i - 1]) {
            None => self.done = true,
            Some(i) => {
                self.rgs[i] += 1;
                self.max[i] = self.max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.max[j] = self.max[i];
                }
            }
        }
        Some(out)
    }
}

pub fn enumerate_set_partitions(n: usize) -> Result<SetPartitions> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::ArityRange(n));
    }
    Ok(SetPartitions {
        rgs: vec![0; n],
        max: vec![0; n],
        done: false,
    })
}

/// `λ_1 ≥ λ_2 ≥ ... ≥ λ_ℓ ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPartition {
    parts: Vec<usize>,
}

/// `q_i`, the number of parts equal to `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Multiplicities(pub BTreeMap<usize, usize>);

impl IntPartition {
    /// Requires positive, nonincreasing parts.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        let ok = !parts.is_empty()
            && parts.iter().all(|&p| p >= 1)
            && parts.windows(2).all(|w| w[0] >= w[1]);
        if !ok {
            return Err(Error::NotAPartition {
                n: parts.iter().sum(),
                parts,
            });
        }
        Ok(Self { parts })
    }

    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts `ℓ`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn multiplicities(&self) -> Multiplicities {
        let mut q = BTreeMap::new();
        for &p in &self.parts {
            *q.entry(p).or_insert(0) += 1;
        }
        Multiplicities(q)
    }

    pub fn c_lambda(&self) -> BigInt {
        let mag: BigInt = self.parts.iter().map(|&p| factorial(p - 1)).product();
        if self.len() % 2 == 1 {
            mag
        } else {
            -mag
        }
    }

    pub fn count_by_shape(&self) -> BigInt {
        let denom: BigInt = self
            .multiplicities()
            .0
            .iter()
            .map(|(&i, &q)| num_traits::pow(factorial(i), q) * factorial(q))
            .product();
        factorial(self.n()) / denom
    }
}

pub fn c_lambda(lam: &IntPartition) -> BigInt {
    lam.c_lambda()
}

pub fn count_by_shape(lam: &IntPartition) -> BigInt {
    lam.count_by_shape()
}

/// Integer partitions of `n` in reverse lexicographic order, `(n)` first.
pub fn int_partitions(n: usize) -> Vec<IntPartition> {
    fn rec(rest: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<IntPartition>) {
        if rest == 0 {
            out.push(IntPartition { parts: cur.clone() });
            return;
        }
        for p in (1..=rest.min(cap)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// One set partition prepared for summation: block masks and its `c_λ`.
#[derive(Debug, Clone)]
pub struct PartitionTerm {
    pub masks: Vec<u16>,
    pub coeff: Rational,
    pub shape: IntPartition,
}

/// All set partitions of `[n]` with their coefficients, built once per `n`.
pub fn partition_table(n: usize) -> Result<&'static [PartitionTerm]> {
    static TABLES: [OnceLock<Vec<PartitionTerm>>; MAX_N + 1] =
        [const { OnceLock::new() }; MAX_N + 1];
    let parts = enumerate_set_partitions(n)?;
    Ok(TABLES[n].get_or_init(|| {
        parts
            .map(|sigma| {
                let shape = sigma.shape();
                PartitionTerm {
                    masks: sigma.block_masks(),
                    coeff: Rational::from_integer(shape.c_lambda()),
                    shape,
                }
            })
            .collect()
    }))
}

/// `Σ_{λ⊢n} c_λ · count_by_shape(λ)`: `E_n` with every function equal to one.
pub fn signed_shape_total(n: usize) -> BigInt {
    int_partitions(n)
        .iter()
        .map(|l| l.c_lambda() * l.count_by_shape())
        .fold(BigInt::from(0), |a, b| a + b)
}

impl Multiplicities {
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|(i, q)| i * q).sum()
    }
}
