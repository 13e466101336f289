//! Partition-sum correlation functionals.
//!
//! For principal-upset indicators `f_i = 1_{⟨C_i⟩}` with supports `A_i`,
//! every `E_δ = ⟨∏_{i∈δ} f_i⟩_μ` is the probability of a single principal
//! upset, `μ(⟨∪_{i∈δ} C_i⟩)`. An [`Instance`] tabulates these for all `2^n`
//! index sets once, and every functional below is a signed sum over the set
//! partitions of `[n]` of products of table entries.
//!
//! The interpolation family `E^k` (`0 ≤ k ≤ n−1`) distinguishes the last
//! function `f_n`. For a set partition `σ`, the block `σ(A_n)` containing `n`
//! contributes `μ(A_n)^{|[k]∩σ(A_n)|} · μ(∩_{i∈σ(A_n)} A_i)`; any other block
//! `B` contributes `μ(A_n)^{max(|B∩[k]|−1, 0)} · μ(∩_{i∈B∩[k]} (A_i∩A_n) ∩
//! ∩_{i∈B∖[k]} A_i)`, with `[k] = {1, ..., k}`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{MonotoneComb, SubsetId};
use crate::measure::Measure;
use crate::partitions::{self, IntPartition, SetPartition, MAX_N};
use crate::rational::{self, factorial, serde_q, Rational};
use crate::Mode;

/// A measure together with `n` principal-upset indicators, in order.
#[derive(Debug, Clone)]
pub struct Instance {
    mu: Arc<Measure>,
    gens: Vec<SubsetId>,
    // probs[δ] = μ(∩_{i∈δ} A_i), δ a bit mask over [n]; probs[0] = 1
    probs: Vec<Rational>,
    scaled: Scaled,
}

impl Instance {
    pub fn new(mu: impl Into<Arc<Measure>>, gens: Vec<SubsetId>) -> Result<Self> {
        let mu = mu.into();
        let n = gens.len();
        if !(1..=MAX_N).contains(&n) {
            return Err(Error::ArityRange(n));
        }
        for g in &gens {
            mu.ground().check(*g)?;
        }
        let mut unions = vec![SubsetId::EMPTY; 1 << n];
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            unions[mask] = unions[mask & (mask - 1)].join(gens[low]);
        }
        let probs: Vec<Rational> = unions.iter().map(|u| mu.event_prob(*u).clone()).collect();
        let scaled = Scaled::new(&probs, n);
        Ok(Self {
            mu,
            gens,
            probs,
            scaled,
        })
    }

    pub fn n(&self) -> usize {
        self.gens.len()
    }

    pub fn measure(&self) -> &Measure {
        &self.mu
    }

    pub fn generators(&self) -> &[SubsetId] {
        &self.gens
    }

    fn full_mask(&self) -> usize {
        (1 << self.n()) - 1
    }

    fn last_bit(&self) -> usize {
        1 << (self.n() - 1)
    }

    /// `μ(A_n)`.
    pub fn last_prob(&self) -> &Rational {
        &self.probs[self.last_bit()]
    }

    /// `μ(∩_{i∈[n]} A_i)`.
    pub fn intersection_prob(&self) -> &Rational {
        &self.probs[self.full_mask()]
    }

    fn mask_of(&self, idx: &[usize]) -> Result<usize> {
        let n = self.n();
        idx.iter().try_fold(0usize, |m, &i| {
            if i == 0 || i > n {
                Err(Error::IndexOutOfRange { index: i, n })
            } else {
                Ok(m | 1 << (i - 1))
            }
        })
    }

    /// `E_δ` for a nonempty set of 1-based indices.
    pub fn e_delta(&self, delta: &[usize]) -> Result<Rational> {
        if delta.is_empty() {
            return Err(Error::EmptyProduct);
        }
        Ok(self.probs[self.mask_of(delta)?].clone())
    }

    /// `E_σ = ∏_i E_{σ_i}`.
    pub fn e_sigma(&self, sigma: &SetPartition) -> Result<Rational> {
        self.check_partition(sigma)?;
        Ok(sigma
            .block_masks()
            .iter()
            .map(|&b| &self.probs[b as usize])
            .product())
    }

    fn check_partition(&self, sigma: &SetPartition) -> Result<()> {
        if sigma.n() != self.n() {
            return Err(Error::InvalidSetPartition(format!(
                "partition of [{}] applied to {} functions",
                sigma.n(),
                self.n()
            )));
        }
        Ok(())
    }

    /// `E_λ = Σ_{σ: λ(σ)=λ} E_σ`.
    pub fn e_lambda(&self, lam: &IntPartition) -> Result<Rational> {
        if lam.n() != self.n() {
            return Err(Error::NotAPartition {
                parts: lam.parts().to_vec(),
                n: self.n(),
            });
        }
        Ok(partitions::partition_table(self.n())?
            .iter()
            .filter(|t| &t.shape == lam)
            .map(|t| block_product(&self.probs, &t.masks))
            .sum())
    }

    /// `E_{n,μ} = Σ_{λ⊢n} c_λ E_λ`.
    pub fn e_n(&self) -> Rational {
        self.scaled.partition_sum(self.n())
    }

    /// `I_n = (n−1)! μ(∩A_i) − E_n`.
    pub fn i_n(&self) -> Rational {
        Rational::from_integer(factorial(self.n() - 1)) * self.intersection_prob() - self.e_n()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k >= self.n() {
            return Err(Error::KRange {
                k,
                max: self.n() - 1,
            });
        }
        Ok(())
    }

    /// `E^k_σ`.
    pub fn ek_sigma(&self, sigma: &SetPartition, k: usize) -> Result<Rational> {
        self.check_partition(sigma)?;
        self.check_k(k)?;
        let pows = powers(self.last_prob(), self.n());
        Ok(self.ek_term(&sigma.block_masks(), k, &pows))
    }

    fn ek_term(&self, masks: &[u16], k: usize, pows: &[Rational]) -> Rational {
        let kmask = (1usize << k) - 1;
        let last = self.last_bit();
        let mut exp = 0usize;
        let mut prod = Rational::one();
        for &b in masks {
            let b = b as usize;
            let in_k = (b & kmask).count_ones() as usize;
            if b & last != 0 {
                exp += in_k;
                prod *= &self.probs[b];
            } else if in_k > 0 {
                exp += in_k - 1;
                prod *= &self.probs[b | last];
            } else {
                prod *= &self.probs[b];
            }
            if prod.is_zero() {
                return prod;
            }
        }
        prod * &pows[exp]
    }

    /// Numerator of `E^k_σ` over `den^deg`, with its degree.
    fn ek_term_scaled(&self, masks: &[u16], k: usize) -> (BigInt, usize) {
        let kmask = (1usize << k) - 1;
        let last = self.last_bit();
        let nums = &self.scaled.nums;
        let mut exp = 0usize;
        let mut prod = BigInt::one();
        for &b in masks {
            let b = b as usize;
            let in_k = (b & kmask).count_ones() as usize;
            if b & last != 0 {
                exp += in_k;
                prod *= &nums[b];
            } else if in_k > 0 {
                exp += in_k - 1;
                prod *= &nums[b | last];
            } else {
                prod *= &nums[b];
            }
            if prod.is_zero() {
                return (prod, 0);
            }
        }
        (
            prod * num_traits::pow(nums[last].clone(), exp),
            masks.len() + exp,
        )
    }

    /// `E^k_{n,μ} = Σ_λ c_λ Σ_{σ: λ(σ)=λ} E^k_σ`.
    pub fn ek_n(&self, k: usize) -> Result<Rational> {
        self.check_k(k)?;
        let mut acc = BigInt::zero();
        for t in partitions::partition_table(self.n())? {
            let (num, deg) = self.ek_term_scaled(&t.masks, k);
            acc += self.scaled.lift(t.coeff.numer() * num, deg, self.n());
        }
        Ok(self.scaled.finish(acc, self.n()))
    }

    /// `E^k` for every `k = 0..n−1` in one pass over the partitions.
    pub fn ek_all(&self) -> Vec<Rational> {
        let n = self.n();
        let mut acc = vec![BigInt::zero(); n];
        for t in partitions::partition_table(n).expect("n validated at construction") {
            for (k, slot) in acc.iter_mut().enumerate() {
                let (num, deg) = self.ek_term_scaled(&t.masks, k);
                *slot += self.scaled.lift(t.coeff.numer() * num, deg, n);
            }
        }
        acc.into_iter().map(|a| self.scaled.finish(a, n)).collect()
    }

    /// `I^k = μ(A_n)^k μ(∩A_i) − E^k`.
    pub fn ik_n(&self, k: usize) -> Result<Rational> {
        Ok(self.lead(k) - self.ek_n(k)?)
    }

    /// `I^k = (n−1)! μ(A_n)^k μ(∩A_i) − E^k`, the normalization under which
    /// `I^0 = I_n`.
    pub fn ik_n_scaled(&self, k: usize) -> Result<Rational> {
        Ok(self.scaled_lead(k) - self.ek_n(k)?)
    }

    fn lead(&self, k: usize) -> Rational {
        num_traits::pow(self.last_prob().clone(), k) * self.intersection_prob()
    }

    fn scaled_lead(&self, k: usize) -> Rational {
        Rational::from_integer(factorial(self.n() - 1)) * self.lead(k)
    }

    /// Same generators under `μ_{A_n}`.
    pub fn conditional_instance(&self) -> Result<Instance> {
        Instance::new(
            self.mu.conditional(self.gens[self.n() - 1])?,
            self.gens.clone(),
        )
    }
}

fn powers(a: &Rational, n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(Rational::one());
    for i in 0..n {
        let next = &out[i] * a;
        out.push(next);
    }
    out
}

fn block_product(table: &[Rational], masks: &[u16]) -> Rational {
    masks.iter().map(|&b| &table[b as usize]).product()
}

/// `Σ_σ c_{λ(σ)} ∏_{B∈σ} table[B]` over the set partitions of `[n]`.
fn signed_partition_sum(n: usize, table: &[Rational]) -> Rational {
    Scaled::new(table, n).partition_sum(n)
}

/// A table of rationals as integer numerators over one common denominator,
/// so that partition sums multiply integers and normalize once at the end.
#[derive(Debug, Clone)]
struct Scaled {
    nums: Vec<BigInt>,
    // den^0 ..= den^max_degree
    den_pows: Vec<BigInt>,
}

impl Scaled {
    fn new(table: &[Rational], max_degree: usize) -> Self {
        let den = table.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let nums = table
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        let mut den_pows = vec![BigInt::one()];
        for i in 0..max_degree {
            let next = &den_pows[i] * &den;
            den_pows.push(next);
        }
        Self { nums, den_pows }
    }

    /// Brings a numerator of degree `deg` up to degree `top`.
    fn lift(&self, num: BigInt, deg: usize, top: usize) -> BigInt {
        if num.is_zero() {
            num
        } else {
            num * &self.den_pows[top - deg]
        }
    }

    fn finish(&self, num: BigInt, top: usize) -> Rational {
        Rational::new(num, self.den_pows[top].clone())
    }

    /// `Σ_σ c_{λ(σ)} ∏_{B∈σ} table[B]`; `top` must be at least `n`.
    fn partition_sum(&self, n: usize) -> Rational {
        let mut acc = BigInt::zero();
        for t in partitions::partition_table(n).expect("n within range") {
            let num: BigInt = t.masks.iter().map(|&b| &self.nums[b as usize]).product();
            acc += self.lift(t.coeff.numer() * num, t.masks.len(), n);
        }
        self.finish(acc, n)
    }
}

pub fn e_n(inst: &Instance) -> Rational {
    inst.e_n()
}

/// `E_n` on nonnegative combinations by expanding every function into its
/// atoms and summing `∏ coefficients · E_n(atoms)` over the atom grid.
pub fn e_n_multilinear(mu: &Arc<Measure>, combs: &[MonotoneComb]) -> Result<Rational> {
    let n = combs.len();
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::ArityRange(n));
    }
    let atoms: Vec<Vec<(&Rational, SubsetId)>> =
        combs.iter().map(|c| c.terms().collect()).collect();
    if atoms.iter().any(Vec::is_empty) {
        return Ok(Rational::zero());
    }
    let mut idx = vec![0usize; n];
    let mut total = Rational::zero();
    loop {
        let coeff: Rational = idx.iter().zip(&atoms).map(|(&i, a)| a[i].0).product();
        let gens = idx.iter().zip(&atoms).map(|(&i, a)| a[i].1).collect();
        total += coeff * Instance::new(Arc::clone(mu), gens)?.e_n();
        let mut pos = 0;
        while pos < n && idx[pos] + 1 == atoms[pos].len() {
            idx[pos] = 0;
            pos += 1;
        }
        if pos == n {
            return Ok(total);
        }
        idx[pos] += 1;
    }
}

/// `E_n` on combinations computed directly: `E_δ` is the expectation of the
/// pointwise product `∏_{i∈δ} f_i`.
pub fn e_n_direct(mu: &Measure, combs: &[MonotoneComb]) -> Result<Rational> {
    let n = combs.len();
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::ArityRange(n));
    }
    let mut products = vec![MonotoneComb::atom(SubsetId::EMPTY); 1 << n];
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        products[mask] = products[mask & (mask - 1)].product(&combs[low]);
    }
    let table: Vec<Rational> = products.iter().map(|f| mu.expectation(f)).collect();
    Ok(signed_partition_sum(n, &table))
}

/// `E_n` with its sign verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnReport {
    pub n: usize,
    #[serde(with = "serde_q")]
    pub value: Rational,
    pub fkg: bool,
    pub nonneg: bool,
}

/// Evaluates `E_n`. Verification mode requires the FKG hypothesis and fails
/// on a negative value; exploration mode only reports.
pub fn evaluate_en(inst: &Instance, mode: Mode) -> Result<EnReport> {
    let fkg = inst.measure().check_fkg();
    if mode == Mode::Verify {
        if let Some(w) = &fkg.witness {
            return Err(Error::NotFkg { a: w.a, b: w.b });
        }
    }
    let value = inst.e_n();
    let nonneg = !value.is_negative();
    if mode == Mode::Verify && !nonneg {
        return Err(Error::Violation {
            check: "E_n >= 0",
            detail: format!(
                "E_{} = {} for generators {:?}",
                inst.n(),
                rational::format(&value),
                inst.generators()
            ),
        });
    }
    Ok(EnReport {
        n: inst.n(),
        value,
        fkg: fkg.holds,
        nonneg,
    })
}

/// The `E^k`/`I^k` family at one level of the descent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelChain {
    pub level: usize,
    /// Original 1-based index of the function conditioned on at this level.
    pub conditioned_index: usize,
    /// Original indices in the order used at this level (last = conditioned).
    pub order: Vec<usize>,
    pub generators: Vec<SubsetId>,
    /// `μ(A_n)` under this level's measure.
    #[serde(with = "serde_q")]
    pub last_prob: Rational,
    #[serde(with = "serde_q")]
    pub intersection_prob: Rational,
    #[serde(with = "serde_q::vec")]
    pub e: Vec<Rational>,
    #[serde(with = "serde_q::vec")]
    pub i: Vec<Rational>,
    #[serde(with = "serde_q::vec")]
    pub i_scaled: Vec<Rational>,
    /// `E^k ≥ E^{k+1}` for `k = 0..n−2`.
    pub e_monotone: Vec<bool>,
    /// `I^{k+1} ≥ μ(A_n) I^k` for `k = 0..n−2`.
    pub i_chain: Vec<bool>,
    /// `E^k ≥ 0` for `k = 0..n−1`.
    pub e_nonneg: Vec<bool>,
    pub terminal: Terminal,
}

/// `E^{n−1} = μ(A_n)^n · E_{n,μ_{A_n}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Terminal {
    Holds {
        #[serde(with = "serde_q")]
        value: Rational,
    },
    Fails {
        #[serde(with = "serde_q")]
        lhs: Rational,
        #[serde(with = "serde_q")]
        rhs: Rational,
    },
    /// `μ(A_n) = 0`: every `E^k` vanishes and the descent stops here.
    NullEvent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DescentEnd {
    /// All `n` functions conditioned on; every indicator is identically one
    /// and `E_n(1, ..., 1)` must equal `Σ_λ c_λ · #λ` (zero for `n ≥ 2`).
    Identity {
        #[serde(with = "serde_q")]
        value: Rational,
        #[serde(with = "serde_q")]
        expected: Rational,
    },
    /// Conditioning on a null event at `level`; that level and everything
    /// below it is identically zero.
    NullEvent { level: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub n: usize,
    /// Level 0 is the instance itself.
    pub levels: Vec<LevelChain>,
    pub end: DescentEnd,
}

impl LevelChain {
    pub fn holds(&self) -> bool {
        self.e_monotone.iter().all(|&b| b)
            && self.i_chain.iter().all(|&b| b)
            && self.e_nonneg.iter().all(|&b| b)
            && !matches!(self.terminal, Terminal::Fails { .. })
    }

    fn first_failure(&self) -> Option<String> {
        let at = |v: &[bool]| v.iter().position(|&b| !b);
        if let Some(k) = at(&self.e_monotone) {
            return Some(format!(
                "level {}: E^{k} = {} < E^{} = {}",
                self.level,
                rational::format(&self.e[k]),
                k + 1,
                rational::format(&self.e[k + 1])
            ));
        }
        if let Some(k) = at(&self.i_chain) {
            return Some(format!(
                "level {}: I^{} = {} < mu(A_n) I^{k} with mu(A_n) = {}, I^{k} = {}",
                self.level,
                k + 1,
                rational::format(&self.i[k + 1]),
                rational::format(&self.last_prob),
                rational::format(&self.i[k])
            ));
        }
        if let Some(k) = at(&self.e_nonneg) {
            return Some(format!(
                "level {}: E^{k} = {} < 0",
                self.level,
                rational::format(&self.e[k])
            ));
        }
        if let Terminal::Fails { lhs, rhs } = &self.terminal {
            return Some(format!(
                "level {}: E^(n-1) = {} but mu(A_n)^n E_(n,mu_A_n) = {}",
                self.level,
                rational::format(lhs),
                rational::format(rhs)
            ));
        }
        None
    }
}

impl ChainReport {
    pub fn top(&self) -> &LevelChain {
        &self.levels[0]
    }

    pub fn e(&self) -> &[Rational] {
        &self.top().e
    }

    pub fn i(&self) -> &[Rational] {
        &self.top().i
    }

    /// True when the chain was cut short by `μ(A_n) = 0` at the first level.
    pub fn trivially_terminated(&self) -> bool {
        matches!(self.end, DescentEnd::NullEvent { level: 0 })
    }

    pub fn holds(&self) -> bool {
        self.levels.iter().all(LevelChain::holds)
            && match &self.end {
                DescentEnd::Identity { value, expected } => value == expected,
                DescentEnd::NullEvent { .. } => true,
            }
    }

    pub fn first_failure(&self) -> Option<String> {
        if let Some(f) = self.levels.iter().find_map(LevelChain::first_failure) {
            return Some(f);
        }
        match &self.end {
            DescentEnd::Identity { value, expected } if value != expected => Some(format!(
                "descent ended at E_n(1,...,1) = {} instead of {}",
                rational::format(value),
                rational::format(expected)
            )),
            _ => None,
        }
    }
}

/// `cond` is `μ_{A_n}` for this level, absent when `μ(A_n) = 0`.
fn level_chain(
    inst: &Instance,
    level: usize,
    order: Vec<usize>,
    cond: Option<&Arc<Measure>>,
) -> Result<LevelChain> {
    let n = inst.n();
    let a = inst.last_prob().clone();
    let e = inst.ek_all();
    let i: Vec<Rational> = (0..n).map(|k| inst.lead(k) - &e[k]).collect();
    let i_scaled: Vec<Rational> = (0..n).map(|k| inst.scaled_lead(k) - &e[k]).collect();
    for k in 0..n {
        if &e[k] + &i[k] != inst.lead(k) {
            return Err(Error::Internal(format!("E^{k} + I^{k} identity broken")));
        }
    }
    let e_monotone = (0..n - 1).map(|k| e[k] >= e[k + 1]).collect();
    let i_chain = (0..n - 1).map(|k| i[k + 1] >= &a * &i[k]).collect();
    let e_nonneg = e.iter().map(|v| !v.is_negative()).collect();
    let terminal = if let Some(cond) = cond {
        let cond_inst = Instance::new(Arc::clone(cond), inst.generators().to_vec())?;
        let rhs = num_traits::pow(a.clone(), n) * cond_inst.e_n();
        let lhs = e[n - 1].clone();
        if lhs == rhs {
            Terminal::Holds { value: lhs }
        } else {
            Terminal::Fails { lhs, rhs }
        }
    } else {
        Terminal::NullEvent
    };
    Ok(LevelChain {
        level,
        conditioned_index: order[n - 1],
        order,
        generators: inst.generators().to_vec(),
        last_prob: a,
        intersection_prob: inst.intersection_prob().clone(),
        e,
        i,
        i_scaled,
        e_monotone,
        i_chain,
        e_nonneg,
        terminal,
    })
}

/// Runs the interpolation chain and the recursive descent.
///
/// Level `j` (0-based) conditions on the function with original index `n − j`.
/// Its instance lists the functions in original order with that index moved
/// to the end; every generator has already been joined with the generators
/// conditioned on at earlier levels, and the measure is the corresponding
/// conditional. After `n` levels every indicator is identically one.
pub fn verify_chain(inst: &Instance, mode: Mode) -> Result<ChainReport> {
    if mode == Mode::Verify {
        if let Some(w) = inst.measure().check_fkg().witness {
            return Err(Error::NotFkg { a: w.a, b: w.b });
        }
    }
    let n = inst.n();
    let mut mu = Arc::clone(&inst.mu);
    let mut gens = inst.gens.clone();
    let mut levels = Vec::with_capacity(n);
    let mut end = None;
    for level in 0..n {
        let cond = n - 1 - level;
        let order: Vec<usize> = (0..n).filter(|&i| i != cond).chain([cond]).collect();
        let level_inst = if level == 0 {
            inst.clone()
        } else {
            Instance::new(Arc::clone(&mu), order.iter().map(|&i| gens[i]).collect())?
        };
        let c = gens[cond];
        let next = if level_inst.last_prob().is_zero() {
            None
        } else {
            Some(Arc::new(mu.conditional(c)?))
        };
        let chain = level_chain(
            &level_inst,
            level,
            order.iter().map(|i| i + 1).collect(),
            next.as_ref(),
        )?;
        levels.push(chain);
        let Some(next) = next else {
            end = Some(DescentEnd::NullEvent { level });
            break;
        };
        mu = next;
        for g in gens.iter_mut() {
            *g = g.join(c);
        }
    }
    let end = match end {
        Some(e) => e,
        None => DescentEnd::Identity {
            value: Instance::new(mu, gens)?.e_n(),
            expected: Rational::from_integer(partitions::signed_shape_total(n)),
        },
    };
    let report = ChainReport { n, levels, end };
    if mode == Mode::Verify {
        if let Some(detail) = report.first_failure() {
            return Err(Error::Violation {
                check: "interpolation chain",
                detail,
            });
        }
    }
    Ok(report)
}

/// The four exact quantities behind the conditional correlation inequality
/// `μ(C)μ(A∩B∩C) ≥ μ(A∩C)μ(B∩C)` for principal upsets `A = ⟨a⟩`, `B = ⟨b⟩`,
/// `C = ⟨c⟩`, and its conditional form `μ_C(A∩B) ≥ μ_C(A)μ_C(B)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub a: SubsetId,
    pub b: SubsetId,
    pub c: SubsetId,
    #[serde(with = "serde_q")]
    pub mu_c: Rational,
    #[serde(with = "serde_q")]
    pub mu_abc: Rational,
    #[serde(with = "serde_q")]
    pub mu_ac: Rational,
    #[serde(with = "serde_q")]
    pub mu_bc: Rational,
    pub unconditional: bool,
    /// `None` when `μ(C) = 0`.
    pub conditional: Option<bool>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.unconditional && self.conditional.unwrap_or(true)
    }
}

pub fn lemma_check(mu: &Measure, a: SubsetId, b: SubsetId, c: SubsetId) -> Result<LemmaReport> {
    for s in [a, b, c] {
        mu.ground().check(s)?;
    }
    let p = |g: SubsetId| mu.event_prob(g).clone();
    let (mu_c, mu_abc, mu_ac, mu_bc) = (p(c), p(a.join(b).join(c)), p(a.join(c)), p(b.join(c)));
    let unconditional = &mu_c * &mu_abc >= &mu_ac * &mu_bc;
    let conditional = (!mu_c.is_zero()).then(|| {
        let cond = |x: &Rational| x / &mu_c;
        cond(&mu_abc) >= cond(&mu_ac) * cond(&mu_bc)
    });
    Ok(LemmaReport {
        a,
        b,
        c,
        mu_c,
        mu_abc,
        mu_ac,
        mu_bc,
        unconditional,
        conditional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GroundSet;
    use crate::measure::{self, CouplingBounds};
    use crate::rational::{int, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(e: &[usize]) -> SubsetId {
        SubsetId::from_elements(e)
    }

    fn g(m: usize) -> GroundSet {
        GroundSet::new(m).unwrap()
    }

    fn sp(b: Vec<Vec<usize>>) -> SetPartition {
        SetPartition::from_blocks(b).unwrap()
    }

    fn two_point() -> Measure {
        Measure::from_weights(g(2), vec![int(0), ratio(1, 2), ratio(1, 2), int(0)]).unwrap()
    }

    fn random_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Instance {
        let mu = measure::sample_log_supermodular(rng, g(m), &CouplingBounds::default()).unwrap();
        let gens = (0..n).map(|_| SubsetId(rng.gen_range(0..1 << m))).collect();
        Instance::new(mu, gens).unwrap()
    }

    // Brute-force E_δ: expectation of the pointwise product of indicator tables.
    fn e_delta_oracle(mu: &Measure, gens: &[SubsetId]) -> Rational {
        mu.ground()
            .subsets()
            .filter(|a| gens.iter().all(|c| c.is_subset_of(*a)))
            .map(|a| mu.weight(a).clone())
            .sum()
    }

    // Direct transcription of the E^k_σ product, block by block, on sets.
    fn ek_sigma_oracle(
        mu: &Measure,
        gens: &[SubsetId],
        sigma: &SetPartition,
        k: usize,
    ) -> Rational {
        let n = gens.len();
        let an = gens[n - 1];
        let a = e_delta_oracle(mu, &[an]);
        let mut out = Rational::one();
        for block in sigma.blocks() {
            let in_k = block.iter().filter(|&&i| i <= k).count();
            if block.contains(&n) {
                let sets: Vec<_> = block.iter().map(|&i| gens[i - 1]).collect();
                out *= num_traits::pow(a.clone(), in_k) * e_delta_oracle(mu, &sets);
            } else {
                let sets: Vec<_> = block
                    .iter()
                    .map(|&i| {
                        if i <= k {
                            gens[i - 1].join(an)
                        } else {
                            gens[i - 1]
                        }
                    })
                    .collect();
                out *=
                    num_traits::pow(a.clone(), in_k.saturating_sub(1)) * e_delta_oracle(mu, &sets);
            }
        }
        out
    }

    #[test]
    fn e_delta_examples() {
        let u = Arc::new(Measure::uniform(g(2)));
        let inst = Instance::new(Arc::clone(&u), vec![s(&[1]), s(&[2])]).unwrap();
        assert_eq!(inst.e_delta(&[1]).unwrap(), ratio(1, 2));
        assert_eq!(inst.e_delta(&[1, 2]).unwrap(), ratio(1, 4));
        assert_eq!(inst.e_delta(&[]), Err(Error::EmptyProduct));
        assert!(inst.e_delta(&[3]).is_err());
        let pm = Measure::point_mass(g(3), SubsetId::EMPTY).unwrap();
        let inst = Instance::new(pm, vec![s(&[1]), g(3).full()]).unwrap();
        assert_eq!(inst.e_delta(&[1, 2]).unwrap(), int(0));
    }

    #[test]
    fn e_delta_matches_pointwise_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 4, 4);
            for mask in 1usize..16 {
                let idx: Vec<usize> = (1..=4).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let sets: Vec<_> = idx.iter().map(|&i| inst.generators()[i - 1]).collect();
                assert_eq!(
                    inst.e_delta(&idx).unwrap(),
                    e_delta_oracle(inst.measure(), &sets)
                );
            }
        }
    }

    #[test]
    fn e_sigma_and_lambda_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inst = random_instance(&mut rng, 3, 3);
        let e = |d: &[usize]| inst.e_delta(d).unwrap();
        assert_eq!(
            inst.e_sigma(&sp(vec![vec![1, 2, 3]])).unwrap(),
            e(&[1, 2, 3])
        );
        assert_eq!(
            inst.e_sigma(&sp(vec![vec![1], vec![2], vec![3]])).unwrap(),
            e(&[1]) * e(&[2]) * e(&[3])
        );
        assert_eq!(
            inst.e_sigma(&sp(vec![vec![1], vec![2, 3]])).unwrap(),
            e(&[1]) * e(&[2, 3])
        );
        let lam = |p: &[usize]| IntPartition::new(p.to_vec()).unwrap();
        assert_eq!(inst.e_lambda(&lam(&[3])).unwrap(), e(&[1, 2, 3]));
        assert_eq!(
            inst.e_lambda(&lam(&[2, 1])).unwrap(),
            e(&[1]) * e(&[2, 3]) + e(&[2]) * e(&[1, 3]) + e(&[3]) * e(&[1, 2])
        );
        assert_eq!(
            inst.e_lambda(&lam(&[1, 1, 1])).unwrap(),
            e(&[1]) * e(&[2]) * e(&[3])
        );
        assert!(inst.e_lambda(&lam(&[2, 2])).is_err());
    }

    #[test]
    fn e_n_examples() {
        let pm = measure::product_measure(&[ratio(1, 3), ratio(2, 5)]).unwrap();
        let inst = Instance::new(pm, vec![s(&[1]), s(&[2])]).unwrap();
        assert_eq!(inst.e_n(), int(0));

        let inst = Instance::new(two_point(), vec![s(&[1]), s(&[2])]).unwrap();
        assert_eq!(inst.e_n(), ratio(-1, 4));
        let report = evaluate_en(&inst, Mode::Explore).unwrap();
        assert!(!report.fkg && !report.nonneg);
        assert!(matches!(
            evaluate_en(&inst, Mode::Verify),
            Err(Error::NotFkg { .. })
        ));
    }

    #[test]
    fn e3_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, 3, 3);
            let e = |d: &[usize]| inst.e_delta(d).unwrap();
            let bracket = e(&[1]) * e(&[2, 3]) + e(&[2]) * e(&[1, 3]) + e(&[3]) * e(&[1, 2])
                - e(&[1]) * e(&[2]) * e(&[3]);
            assert_eq!(inst.e_n(), int(2) * e(&[1, 2, 3]) - &bracket);
            assert_eq!(inst.i_n(), bracket);
        }
    }

    #[test]
    fn i_n_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = random_instance(&mut rng, 3, 1);
        assert_eq!(inst.i_n(), int(0));
        let inst = random_instance(&mut rng, 3, 2);
        assert_eq!(
            inst.i_n(),
            inst.e_delta(&[1]).unwrap() * inst.e_delta(&[2]).unwrap()
        );
    }

    #[test]
    fn ek_sigma_n3_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let inst = random_instance(&mut rng, 3, 3);
            let e = |d: &[usize]| inst.e_delta(d).unwrap();
            let a3 = e(&[3]);
            let ek = |b: Vec<Vec<usize>>, k| inst.ek_sigma(&sp(b), k).unwrap();
            assert_eq!(ek(vec![vec![1], vec![2, 3]], 1), e(&[2, 3]) * e(&[1, 3]));
            assert_eq!(ek(vec![vec![1, 3], vec![2]], 1), &a3 * e(&[2]) * e(&[1, 3]));
            assert_eq!(
                ek(vec![vec![1], vec![2], vec![3]], 1),
                &a3 * e(&[2]) * e(&[1, 3])
            );
            assert_eq!(ek(vec![vec![1, 2, 3]], 1), &a3 * e(&[1, 2, 3]));
            assert_eq!(ek(vec![vec![1, 2], vec![3]], 1), &a3 * e(&[1, 2, 3]));
            let sq = &a3 * &a3;
            assert_eq!(ek(vec![vec![1, 2, 3]], 2), &sq * e(&[1, 2, 3]));
            assert_eq!(ek(vec![vec![1, 2], vec![3]], 2), &sq * e(&[1, 2, 3]));
            let mixed = &a3 * e(&[2, 3]) * e(&[1, 3]);
            assert_eq!(ek(vec![vec![1], vec![2, 3]], 2), mixed);
            assert_eq!(ek(vec![vec![1, 3], vec![2]], 2), mixed);
            assert_eq!(ek(vec![vec![1], vec![2], vec![3]], 2), mixed);
        }
    }

    #[test]
    fn ek_sigma_matches_set_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=5 {
            for _ in 0..4 {
                let inst = random_instance(&mut rng, 4, n);
                for sigma in partitions::enumerate_set_partitions(n).unwrap() {
                    for k in 0..n {
                        assert_eq!(
                            inst.ek_sigma(&sigma, k).unwrap(),
                            ek_sigma_oracle(inst.measure(), inst.generators(), &sigma, k)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn ek_zero_is_e_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inst = random_instance(&mut rng, 4, 4);
        for sigma in partitions::enumerate_set_partitions(4).unwrap() {
            assert_eq!(
                inst.ek_sigma(&sigma, 0).unwrap(),
                inst.e_sigma(&sigma).unwrap()
            );
        }
        assert!(inst.ek_sigma(&sp(vec![vec![1, 2, 3, 4]]), 4).is_err());
        assert!(inst.ek_n(4).is_err());
    }

    #[test]
    fn ek_n_n3_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, 4, 3);
            let e = |d: &[usize]| inst.e_delta(d).unwrap();
            let a3 = e(&[3]);
            let (e123, e13, e23) = (e(&[1, 2, 3]), e(&[1, 3]), e(&[2, 3]));
            assert_eq!(inst.ek_n(0).unwrap(), inst.e_n());
            assert_eq!(inst.ek_n(1).unwrap(), &a3 * &e123 - &e23 * &e13);
            assert_eq!(inst.ek_n(2).unwrap(), &a3 * &a3 * &e123 - &a3 * &e23 * &e13);
            // difference normalization
            assert_eq!(inst.ik_n(1).unwrap(), &e13 * &e23);
            assert_eq!(inst.ik_n(2).unwrap(), &a3 * inst.ik_n(1).unwrap());
            // (n-1)! normalization reproduces I_n and the displayed I^1
            assert_eq!(inst.ik_n_scaled(0).unwrap(), inst.i_n());
            assert_eq!(inst.ik_n_scaled(1).unwrap(), &e13 * &e23 + &a3 * &e123);
            assert_eq!(
                inst.ik_n_scaled(2).unwrap(),
                &a3 * inst.ik_n_scaled(1).unwrap()
            );
            assert_eq!(
                inst.ek_all(),
                (0..3).map(|k| inst.ek_n(k).unwrap()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn ik_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=5 {
            let inst = random_instance(&mut rng, 4, n);
            for k in 0..n {
                assert_eq!(inst.ek_n(k).unwrap() + inst.ik_n(k).unwrap(), inst.lead(k));
            }
            assert_eq!(
                inst.ik_n(0).unwrap(),
                inst.i_n()
                    - (Rational::from_integer(factorial(n - 1)) - int(1))
                        * inst.intersection_prob()
            );
        }
    }

    #[test]
    fn chain_n2_by_hand() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 3, 2);
            let e = |d: &[usize]| inst.e_delta(d).unwrap();
            let r = verify_chain(&inst, Mode::Verify).unwrap();
            assert_eq!(r.e()[0], e(&[1, 2]) - e(&[1]) * e(&[2]));
            // σ = {12}: μ(A_2)μ(A_12); σ = {1}{2}: μ(A_2)·μ(A_1∩A_2), sign −1
            assert_eq!(r.e()[1], int(0));
            assert!(r.holds());
        }
    }

    #[test]
    fn chain_uniform_n3() {
        let u = Measure::uniform(g(3));
        let inst = Instance::new(u, vec![s(&[1]), s(&[2]), s(&[3])]).unwrap();
        let r = verify_chain(&inst, Mode::Verify).unwrap();
        // independent coordinates: every E^k vanishes
        assert_eq!(r.e(), &[int(0), int(0), int(0)]);
        assert_eq!(r.i(), &[ratio(1, 8), ratio(1, 16), ratio(1, 32)]);
        assert_eq!(r.levels.len(), 3);
        assert!(matches!(r.end, DescentEnd::Identity { ref value, .. } if value.is_zero()));
        assert!(r.holds());
    }

    #[test]
    fn chain_with_constant_last_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 2..=5 {
            let mut inst = random_instance(&mut rng, 4, n);
            let mut gens = inst.generators().to_vec();
            gens[n - 1] = SubsetId::EMPTY;
            inst = Instance::new(inst.measure().clone(), gens).unwrap();
            let e = inst.ek_all();
            assert!(e.iter().all(|v| v == &e[0]));
        }
    }

    #[test]
    fn chain_null_event_is_trivial() {
        let pm = Measure::point_mass(g(2), s(&[1])).unwrap();
        let inst = Instance::new(pm, vec![s(&[1]), s(&[2])]).unwrap();
        let r = verify_chain(&inst, Mode::Verify).unwrap();
        assert!(r.trivially_terminated());
        assert_eq!(r.top().terminal, Terminal::NullEvent);
        assert!(r.e().iter().all(Zero::is_zero));
        assert!(r.holds());
    }

    #[test]
    fn chain_random_fkg() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let n = rng.gen_range(1..=5);
            let inst = random_instance(&mut rng, 4, n);
            let r = verify_chain(&inst, Mode::Verify).unwrap();
            assert!(r.holds(), "{:?}", r.first_failure());
        }
    }

    #[test]
    fn e_n_of_constant_ones_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mu = Arc::new(measure::sample_unconstrained(&mut rng, g(3), 3));
        for n in 2..=8 {
            let inst = Instance::new(Arc::clone(&mu), vec![SubsetId::EMPTY; n]).unwrap();
            assert_eq!(inst.e_n(), int(0));
        }
    }

    #[test]
    fn multilinear_agrees_with_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..30 {
            let mu = Arc::new(measure::sample_unconstrained(&mut rng, g(3), 3));
            let n = rng.gen_range(1..=4);
            let combs: Vec<_> = (0..n)
                .map(|_| {
                    let terms: Vec<_> = (0..rng.gen_range(0..=3))
                        .map(|_| {
                            (
                                ratio(rng.gen_range(0..4), rng.gen_range(1..4)),
                                SubsetId(rng.gen_range(0..8)),
                            )
                        })
                        .collect();
                    MonotoneComb::new(terms).unwrap()
                })
                .collect();
            assert_eq!(
                e_n_multilinear(&mu, &combs).unwrap(),
                e_n_direct(&mu, &combs).unwrap()
            );
        }
    }

    #[test]
    fn multilinear_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..20 {
            let mu = Arc::new(
                measure::sample_log_supermodular(&mut rng, g(3), &CouplingBounds::default())
                    .unwrap(),
            );
            let atom = |rng: &mut ChaCha8Rng| MonotoneComb::atom(SubsetId(rng.gen_range(0..8)));
            let (g1, g2, f2) = (atom(&mut rng), atom(&mut rng), atom(&mut rng));
            let (a, b) = (ratio(rng.gen_range(0..5), 3), ratio(rng.gen_range(0..5), 2));
            let f1 = g1.scale(&a).add(&g2.scale(&b));
            let lhs = e_n_multilinear(&mu, &[f1.clone(), f2.clone()]).unwrap();
            let rhs = &a * e_n_multilinear(&mu, &[g1.clone(), f2.clone()]).unwrap()
                + &b * e_n_multilinear(&mu, &[g2.clone(), f2.clone()]).unwrap();
            assert_eq!(lhs, rhs);
            let single = e_n_multilinear(&mu, &[g1.clone(), f2.clone()]).unwrap();
            let inst = Instance::new(
                Arc::clone(&mu),
                vec![g1.max_generator(), f2.max_generator()],
            )
            .unwrap();
            assert_eq!(single, inst.e_n());
            let s = ratio(7, 3);
            assert_eq!(
                e_n_multilinear(&mu, &[f1.scale(&s), f2.clone()]).unwrap(),
                &s * e_n_multilinear(&mu, &[f1, f2]).unwrap()
            );
        }
    }

    #[test]
    fn lemma_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mu =
            measure::sample_log_supermodular(&mut rng, g(3), &CouplingBounds::default()).unwrap();
        let r = lemma_check(&mu, s(&[1]), s(&[2]), SubsetId::EMPTY).unwrap();
        assert_eq!(r.mu_c, int(1));
        assert_eq!(
            r.unconditional,
            mu.event_prob(s(&[1, 2])) >= &(mu.event_prob(s(&[1])) * mu.event_prob(s(&[2])))
        );

        let u = Measure::uniform(g(3));
        let r = lemma_check(&u, s(&[1]), s(&[2]), s(&[3])).unwrap();
        assert!(r.holds());
        assert_eq!(&r.mu_c * &r.mu_abc, &r.mu_ac * &r.mu_bc);

        let r = lemma_check(&u, s(&[1]), s(&[1]), s(&[3])).unwrap();
        assert!(&r.mu_c * &r.mu_abc > &r.mu_ac * &r.mu_bc);
        let r = lemma_check(&u, s(&[3]), s(&[3]), s(&[3])).unwrap();
        assert_eq!(&r.mu_c * &r.mu_abc, &r.mu_ac * &r.mu_bc);

        let pm = Measure::point_mass(g(2), s(&[1])).unwrap();
        let r = lemma_check(&pm, s(&[1]), s(&[1]), s(&[2])).unwrap();
        assert_eq!(r.conditional, None);
        assert!(r.unconditional);
    }
}
