//! Boolean lattice `2^[m]`: subsets as bit masks, principal upsets and the
//! cone of nonnegative combinations of their indicators.
//!
//! Point `i` of the ground set `[m] = {1, ..., m}` is bit `i - 1` of a
//! [`SubsetId`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub const MAX_GROUND: usize = 12;

/// The ground set `X = [m]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    m: usize,
}

impl GroundSet {
    pub fn new(m: usize) -> Result<Self> {
        if !(1..=MAX_GROUND).contains(&m) {
            return Err(Error::GroundSize(m));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of subsets, `2^m`.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    pub fn full(&self) -> SubsetId {
        SubsetId((1u32 << self.m) - 1)
    }

    pub fn contains(&self, s: SubsetId) -> bool {
        s.0 < (1u32 << self.m)
    }

    pub fn check(&self, s: SubsetId) -> Result<SubsetId> {
        if self.contains(s) {
            Ok(s)
        } else {
            Err(Error::SubsetOutOfRange {
                subset: s.0,
                m: self.m,
            })
        }
    }

    /// All subsets in index order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetId> {
        (0..self.size() as u32).map(SubsetId)
    }

    /// Supersets of `c` inside the ground set, by walking the submasks of the
    /// complement. Visits `2^(m - |c|)` subsets.
    pub fn supersets(&self, c: SubsetId) -> Supersets {
        let free = self.full().0 & !c.0;
        Supersets {
            base: c.0,
            free,
            cur: Some(free),
        }
    }
}

pub struct Supersets {
    base: u32,
    free: u32,
    cur: Option<u32>,
}

impl Iterator for Supersets {
    type Item = SubsetId;

    fn next(&mut self) -> Option<SubsetId> {
        let sub = self.cur?;
        self.cur = if sub == 0 {
            None
        } else {
            Some((sub - 1) & self.free)
        };
        Some(SubsetId(self.base | sub))
    }
}

/// A subset of `[m]` encoded by its characteristic index.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SubsetId(pub u32);

impl SubsetId {
    pub const EMPTY: SubsetId = SubsetId(0);

    /// Builds a subset from 1-based elements.
    pub fn from_elements(elems: &[usize]) -> Self {
        SubsetId(elems.iter().fold(0, |acc, &e| acc | 1 << (e - 1)))
    }

    /// 1-based elements in increasing order.
    pub fn elements(&self) -> Vec<usize> {
        (0..32)
            .filter(|i| self.0 >> i & 1 == 1)
            .map(|i| i + 1)
            .collect()
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(&self, other: SubsetId) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn meet(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 & other.0)
    }

    pub fn join(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 | other.0)
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Intersection, the lattice meet `A ∧ B`.
pub fn meet(a: SubsetId, b: SubsetId) -> SubsetId {
    a.meet(b)
}

/// Union, the lattice join `A ∨ B`.
pub fn join(a: SubsetId, b: SubsetId) -> SubsetId {
    a.join(b)
}

/// Indicator of the principal upset `⟨C⟩ = {A : A ⊇ C}`: a unimodal monotone
/// nondecreasing Boolean function with unique minimal support element `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnimodalFn {
    pub generator: SubsetId,
}

impl UnimodalFn {
    pub fn new(generator: SubsetId) -> Self {
        Self { generator }
    }

    pub fn eval(&self, a: SubsetId) -> u8 {
        u8::from(self.generator.is_subset_of(a))
    }
}

pub fn eval_unimodal(f: UnimodalFn, a: SubsetId) -> u8 {
    f.eval(a)
}

/// Pointwise product of principal-upset indicators: `⟨C_1⟩ ∩ ⟨C_2⟩ = ⟨C_1 ∪ C_2⟩`.
pub fn product_generator(fs: &[UnimodalFn]) -> Result<UnimodalFn> {
    if fs.is_empty() {
        return Err(Error::EmptyProduct);
    }
    Ok(UnimodalFn::new(
        fs.iter()
            .fold(SubsetId::EMPTY, |acc, f| acc.join(f.generator)),
    ))
}

/// `f = Σ_j c_j · 1_{⟨C_j⟩}` kept in canonical form: one coefficient per
/// generator, zero coefficients dropped, generators in index order.
///
/// Coefficients are nonnegative unless the value was built through
/// [`MonotoneComb::signed`], which exists for exploration outside the cone.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonotoneComb {
    terms: BTreeMap<SubsetId, Rational>,
}

impl MonotoneComb {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Rejects negative coefficients.
    pub fn new(terms: impl IntoIterator<Item = (Rational, SubsetId)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        if let Some((c, _)) = terms.iter().find(|(c, _)| c.is_negative()) {
            return Err(Error::NegativeCoefficient(rational::format(c)));
        }
        Ok(Self::signed(terms))
    }

    /// Accepts coefficients of any sign.
    pub fn signed(terms: impl IntoIterator<Item = (Rational, SubsetId)>) -> Self {
        let mut out = Self::zero();
        for (c, g) in terms {
            out.add_term(c, g);
        }
        out
    }

    pub fn atom(generator: SubsetId) -> Self {
        Self::signed([(rational::int(1), generator)])
    }

    fn add_term(&mut self, c: Rational, g: SubsetId) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(g).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    /// `(coefficient, generator)` pairs in generator order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, SubsetId)> {
        self.terms.iter().map(|(g, c)| (c, *g))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_in_cone(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn max_generator(&self) -> SubsetId {
        self.terms.keys().fold(SubsetId::EMPTY, |a, g| a.join(*g))
    }

    pub fn eval(&self, a: SubsetId) -> Rational {
        self.terms
            .iter()
            .filter(|(g, _)| g.is_subset_of(a))
            .map(|(_, c)| c.clone())
            .sum()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::signed(self.terms().map(|(c, g)| (c * s, g)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, g) in other.terms() {
            out.add_term(c.clone(), g);
        }
        out
    }

    /// Pointwise product, expanded bilinearly over atoms with generator unions.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (c1, g1) in self.terms() {
            for (c2, g2) in other.terms() {
                out.add_term(c1 * c2, g1.join(g2));
            }
        }
        out
    }
}

pub fn eval_comb(f: &MonotoneComb, a: SubsetId) -> Rational {
    f.eval(a)
}

/// True iff `values` is nondecreasing along every covering pair `(A, A ∪ {i})`.
pub fn is_monotone_table(ground: GroundSet, values: &[Rational]) -> Result<bool> {
    if values.len() != ground.size() {
        return Err(Error::TableSize {
            got: values.len(),
            expected: ground.size(),
        });
    }
    for a in 0..ground.size() {
        for i in 0..ground.m() {
            let up = a | 1 << i;
            if up != a && values[a] > values[up] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
