//! Truncated formal power series in `t`.
//!
//! [`ScalarSeries`] carries exact rational coefficients `a_0..a_D`;
//! [`FnSeries`] carries set-function coefficients `p_1..p_D` (zero constant
//! term), each a [`MonotoneComb`].
//!
//! The product `∏_A (1 − p(A))^{μ(A)}` is never formed directly. Its logarithm
//! is `⟨ln(1 − p)⟩_μ = −Σ_i ⟨p^i⟩_μ / i`, so the left side is
//! `1 − exp(−Σ_i ⟨p^i⟩_μ / i)`, computed degree by degree. Powers of `p` are
//! expanded pointwise first and expectations taken per degree afterwards.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional;
use crate::lattice::MonotoneComb;
use crate::measure::Measure;
use crate::partitions::MAX_N;
use crate::rational::{self, factorial, serde_q, Rational};
use crate::Mode;

pub const DEFAULT_DEGREE: usize = 6;
pub const MAX_DEGREE: usize = 10;
/// The partition side needs `E_n` with `n` up to the degree.
pub const MAX_RHS_DEGREE: usize = MAX_N;

fn check_degree(d: usize, max: usize) -> Result<()> {
    if !(1..=max).contains(&d) {
        return Err(Error::DegreeRange(d));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarSeries {
    #[serde(with = "serde_q::vec")]
    coeffs: Vec<Rational>,
}

impl ScalarSeries {
    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); degree + 1],
        }
    }

    pub fn one(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Coefficients `a_0..a_D`; the degree bound is `len − 1`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs a constant term");
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, d: usize) -> &Rational {
        &self.coeffs[d]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn same_degree(&self, other: &Self) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_degree(other)?;
        Ok(Self::from_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * s).collect())
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_degree(other)?;
        let d = self.degree();
        let mut out = vec![Rational::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=d - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::from_coeffs(out))
    }

    /// `exp(s) = Σ_{j=0}^{D} s^j / j!` for `s` with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::ConstantTerm(rational::format(&self.coeffs[0]), "0"));
        }
        let d = self.degree();
        let mut out = Self::one(d);
        let mut power = Self::one(d);
        for j in 1..=d {
            power = power.mul(self)?;
            let inv = Rational::new(1.into(), factorial(j));
            out = out.add(&power.scale(&inv))?;
        }
        Ok(out)
    }

    /// `log(1 + u) = Σ_{j=1}^{D} (−1)^{j+1} u^j / j` for a series `1 + u`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::ConstantTerm(rational::format(&self.coeffs[0]), "1"));
        }
        let d = self.degree();
        let u = self.sub(&Self::one(d))?;
        let mut out = Self::zero(d);
        let mut power = Self::one(d);
        for j in 1..=d {
            power = power.mul(&u)?;
            let sign = if j % 2 == 1 { 1 } else { -1 };
            out = out.add(&power.scale(&rational::ratio(sign, j as i64)))?;
        }
        Ok(out)
    }
}

pub fn series_add(x: &ScalarSeries, y: &ScalarSeries) -> Result<ScalarSeries> {
    x.add(y)
}

pub fn series_mul(x: &ScalarSeries, y: &ScalarSeries) -> Result<ScalarSeries> {
    x.mul(y)
}

/// `p(A) = p_1(A) t + ... + p_D(A) t^D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnSeries {
    coeffs: Vec<MonotoneComb>,
}

impl FnSeries {
    /// `coeffs[d − 1]` is `p_d`.
    pub fn new(coeffs: Vec<MonotoneComb>) -> Result<Self> {
        check_degree(coeffs.len(), MAX_DEGREE)?;
        Ok(Self { coeffs })
    }

    pub fn zero(degree: usize) -> Result<Self> {
        Self::new(vec![MonotoneComb::zero(); degree])
    }

    /// `t · f`, padded with zeros to degree `D`.
    pub fn linear(f: MonotoneComb, degree: usize) -> Result<Self> {
        let mut s = Self::zero(degree)?;
        s.coeffs[0] = f;
        Ok(s)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `p_d` for `1 ≤ d ≤ D`.
    pub fn coeff(&self, d: usize) -> &MonotoneComb {
        &self.coeffs[d - 1]
    }

    pub fn coeffs(&self) -> &[MonotoneComb] {
        &self.coeffs
    }

    /// First degree whose coefficient leaves the nonnegative cone.
    pub fn first_outside_cone(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| !c.is_in_cone())
            .map(|i| i + 1)
    }

    /// Pointwise `self · other`, truncated; index `d` holds degree `d`.
    fn mul_table(x: &[MonotoneComb], y: &[MonotoneComb]) -> Vec<MonotoneComb> {
        let d = x.len() - 1;
        let mut out = vec![MonotoneComb::zero(); d + 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_empty() {
                continue;
            }
            for (j, b) in y[..=d - i].iter().enumerate() {
                if !b.is_empty() {
                    out[i + j] = out[i + j].add(&a.product(b));
                }
            }
        }
        out
    }

    fn table(&self) -> Vec<MonotoneComb> {
        std::iter::once(MonotoneComb::zero())
            .chain(self.coeffs.iter().cloned())
            .collect()
    }

    /// `p^1, ..., p^D` as function-valued series (index `d` = degree `d`).
    fn powers(&self) -> Vec<Vec<MonotoneComb>> {
        let base = self.table();
        let mut out = vec![base.clone()];
        for _ in 1..self.degree() {
            let next = Self::mul_table(out.last().unwrap(), &base);
            out.push(next);
        }
        out
    }
}

fn expect_table(mu: &Measure, table: &[MonotoneComb]) -> ScalarSeries {
    ScalarSeries::from_coeffs(table.iter().map(|f| mu.expectation(f)).collect())
}

/// `⟨p^i⟩_μ` as a scalar series.
pub fn fn_power_expectation(mu: &Measure, p: &FnSeries, i: usize) -> Result<ScalarSeries> {
    if i == 0 {
        return Err(Error::PowerIndex(i));
    }
    let d = p.degree();
    if i > d {
        return Ok(ScalarSeries::zero(d));
    }
    let base = p.table();
    let mut power = base.clone();
    for _ in 1..i {
        power = FnSeries::mul_table(&power, &base);
    }
    Ok(expect_table(mu, &power))
}

/// `Σ_{i=1}^{D} ⟨p^i⟩_μ / i = −⟨ln(1 − p)⟩_μ`.
pub fn log_moment_series(mu: &Measure, p: &FnSeries) -> Result<ScalarSeries> {
    let d = p.degree();
    p.powers()
        .iter()
        .enumerate()
        .try_fold(ScalarSeries::zero(d), |acc, (i, power)| {
            acc.add(&expect_table(mu, power).scale(&rational::ratio(1, i as i64 + 1)))
        })
}

/// `1 − ∏_A (1 − p(A))^{μ(A)} = 1 − exp(−Σ_i ⟨p^i⟩_μ / i)`.
pub fn lhs_series(mu: &Measure, p: &FnSeries) -> Result<ScalarSeries> {
    let s = log_moment_series(mu, p)?;
    ScalarSeries::one(p.degree()).sub(&s.neg().exp()?)
}

/// Compositions of `d` into `n` positive parts, in lexicographic order.
fn compositions(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 1..=rest - (parts - 1) {
            cur.push(first);
            rec(rest - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 1 && n <= d {
        rec(d, n, &mut Vec::new(), &mut out);
    }
    out
}

/// `Σ_n E_n(p, ..., p) / n!`: the `t^d` coefficient sums
/// `E_n(p_{i_1}, ..., p_{i_n}) / n!` over compositions `i_1 + ... + i_n = d`.
pub fn rhs_series(mu: &Measure, p: &FnSeries) -> Result<ScalarSeries> {
    rhs_with(p, |combs| functional::e_n_direct(mu, combs))
}

/// [`rhs_series`] with every `E_n` expanded over the atom grid.
pub fn rhs_series_multilinear(mu: &Arc<Measure>, p: &FnSeries) -> Result<ScalarSeries> {
    rhs_with(p, |combs| functional::e_n_multilinear(mu, combs))
}

fn rhs_with(
    p: &FnSeries,
    mut e_n: impl FnMut(&[MonotoneComb]) -> Result<Rational>,
) -> Result<ScalarSeries> {
    let d_max = p.degree();
    check_degree(d_max, MAX_RHS_DEGREE)?;
    let mut out = ScalarSeries::zero(d_max);
    for d in 1..=d_max {
        for n in 1..=d {
            let inv = Rational::new(1.into(), factorial(n));
            for comp in compositions(d, n) {
                if comp.iter().any(|&i| p.coeff(i).is_empty()) {
                    continue;
                }
                let combs: Vec<_> = comp.iter().map(|&i| p.coeff(i).clone()).collect();
                out.coeffs[d] += e_n(&combs)? * &inv;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub degree: usize,
    pub equal: bool,
    /// Lowest degree where the two sides differ.
    pub first_discrepancy: Option<usize>,
    pub lhs: ScalarSeries,
    pub rhs: ScalarSeries,
}

/// Coefficientwise comparison of [`lhs_series`] and [`rhs_series`]. The
/// identity is algebraic, so no hypothesis on `μ` is needed.
pub fn verify_identity_e4(mu: &Measure, p: &FnSeries) -> Result<IdentityReport> {
    let lhs = lhs_series(mu, p)?;
    let rhs = rhs_series(mu, p)?;
    let first_discrepancy = (0..=p.degree()).find(|&d| lhs.coeff(d) != rhs.coeff(d));
    Ok(IdentityReport {
        degree: p.degree(),
        equal: first_discrepancy.is_none(),
        first_discrepancy,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonnegReport {
    pub degree: usize,
    pub nonneg: bool,
    pub first_negative: Option<usize>,
    pub coeffs: ScalarSeries,
}

/// Sign check of every coefficient of [`lhs_series`]. Verification mode
/// requires an FKG measure and cone-valued coefficients, and fails on a
/// negative coefficient.
pub fn check_nonneg_e2(mu: &Measure, p: &FnSeries, mode: Mode) -> Result<NonnegReport> {
    if mode == Mode::Verify {
        if let Some(w) = mu.check_fkg().witness {
            return Err(Error::NotFkg { a: w.a, b: w.b });
        }
        if let Some(d) = p.first_outside_cone() {
            return Err(Error::OutsideCone(d));
        }
    }
    let coeffs = lhs_series(mu, p)?;
    let first_negative = coeffs.coeffs().iter().position(|c| c.is_negative());
    if let (Mode::Verify, Some(d)) = (mode, first_negative) {
        return Err(Error::Violation {
            check: "series coefficients >= 0",
            detail: format!("t^{d} coefficient is {}", rational::format(coeffs.coeff(d))),
        });
    }
    Ok(NonnegReport {
        degree: p.degree(),
        nonneg: first_negative.is_none(),
        first_negative,
        coeffs,
    })
}
