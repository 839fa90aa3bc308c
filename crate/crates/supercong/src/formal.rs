//! Truncated power-series algebra over exact rationals, formal group laws
//! from hypergeometric logarithms, and p-integrality certification.
//!
//! Every operation takes an explicit degree cap; nothing is ever claimed
//! beyond the cap.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::hyperseries::f_r;
use crate::padic::{reduce_rational, PadicInt};
use crate::rational::{binomial, rat, valuation, Rational};
use crate::report::{param_list, Claim, CongruenceReport, SkipReason, ValuationResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormalError {
    #[error("composition requires a series with zero constant term")]
    CompositionAtUnit,
    #[error("reversion requires a zero constant term and unit linear term")]
    NotReversible,
}

/// A power series known exactly through degree `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn new(mut coeffs: Vec<Rational>, cap: usize) -> Self {
        coeffs.resize(cap + 1, Rational::zero());
        TruncatedSeries { coeffs }
    }

    pub fn zero(cap: usize) -> Self {
        Self::new(vec![], cap)
    }

    /// The series `x`.
    pub fn identity(cap: usize) -> Self {
        Self::new(vec![Rational::zero(), Rational::one()], cap)
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let cap = self.cap().min(other.cap());
        Self::new(
            (0..=cap)
                .map(|i| &self.coeffs[i] + &other.coeffs[i])
                .collect(),
            cap,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let cap = self.cap().min(other.cap());
        Self::new(
            (0..=cap)
                .map(|i| &self.coeffs[i] - &other.coeffs[i])
                .collect(),
            cap,
        )
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let cap = self.cap().min(other.cap());
        let mut out = vec![Rational::zero(); cap + 1];
        for i in 0..=cap {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=cap - i {
                if !other.coeffs[j].is_zero() {
                    out[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        Self::new(out, cap)
    }

    pub fn derivative(&self) -> Self {
        let cap = self.cap();
        let mut out = vec![Rational::zero(); cap + 1];
        for i in 1..=cap {
            out[i - 1] = &self.coeffs[i] * rat(i as i64, 1);
        }
        Self::new(out, cap)
    }

    /// `self(g(x))`; requires `g(0) = 0`.
    pub fn compose(&self, g: &Self) -> Result<Self, FormalError> {
        if !g.coeffs[0].is_zero() {
            return Err(FormalError::CompositionAtUnit);
        }
        let cap = self.cap().min(g.cap());
        let mut acc = Self::new(vec![self.coeffs[cap].clone()], cap);
        for i in (0..cap).rev() {
            acc = acc.multiply(g);
            acc.coeffs[0] += &self.coeffs[i];
        }
        Ok(acc)
    }

    /// Multiplicative inverse `1/self`; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, FormalError> {
        if self.coeffs[0].is_zero() {
            return Err(FormalError::NotReversible);
        }
        let cap = self.cap();
        let c0 = Rational::one() / &self.coeffs[0];
        let mut out = vec![Rational::zero(); cap + 1];
        out[0] = c0.clone();
        for i in 1..=cap {
            let mut acc = Rational::zero();
            for j in 1..=i {
                acc += &self.coeffs[j] * &out[i - j];
            }
            out[i] = -acc * &c0;
        }
        Ok(Self::new(out, cap))
    }

    /// Compositional inverse by Newton iteration:
    /// `g <- g - (self(g) - x) / self'(g)`, accuracy doubling per step.
    pub fn reversion(&self) -> Result<Self, FormalError> {
        if !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(FormalError::NotReversible);
        }
        let cap = self.cap();
        let id = Self::identity(cap);
        let df = self.derivative();
        let mut g = Self::new(
            vec![Rational::zero(), Rational::one() / &self.coeffs[1]],
            cap,
        );
        let mut correct = 1usize;
        while correct < cap {
            let residual = self.compose(&g)?.sub(&id);
            let slope = df.compose(&g)?.inverse()?;
            g = g.sub(&residual.multiply(&slope));
            correct *= 2;
        }
        debug_assert_eq!(self.compose(&g).unwrap(), Self::identity(cap));
        Ok(g)
    }
}

/// A bivariate series known through total degree `cap`; `coeffs[i][j]` is
/// the coefficient of `x^i y^j`, stored for `i + j <= cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedBiSeries {
    coeffs: Vec<Vec<Rational>>,
}

impl TruncatedBiSeries {
    pub fn zero(cap: usize) -> Self {
        TruncatedBiSeries {
            coeffs: (0..=cap)
                .map(|i| vec![Rational::zero(); cap - i + 1])
                .collect(),
        }
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize, j: usize) -> &Rational {
        &self.coeffs[i][j]
    }

    /// Embed a univariate series as a series in x alone (or y alone).
    pub fn from_univariate(f: &TruncatedSeries, second_variable: bool, cap: usize) -> Self {
        let mut out = Self::zero(cap);
        for i in 0..=cap.min(f.cap()) {
            if second_variable {
                out.coeffs[0][i] = f.coeff(i).clone();
            } else {
                out.coeffs[i][0] = f.coeff(i).clone();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let cap = self.cap().min(other.cap());
        let mut out = Self::zero(cap);
        for i in 0..=cap {
            for j in 0..=cap - i {
                out.coeffs[i][j] = &self.coeffs[i][j] + &other.coeffs[i][j];
            }
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let cap = self.cap().min(other.cap());
        let mut out = Self::zero(cap);
        for i1 in 0..=cap {
            for j1 in 0..=cap - i1 {
                if self.coeffs[i1][j1].is_zero() {
                    continue;
                }
                for i2 in 0..=cap - i1 - j1 {
                    for j2 in 0..=cap - i1 - j1 - i2 {
                        if !other.coeffs[i2][j2].is_zero() {
                            out.coeffs[i1 + i2][j1 + j2] +=
                                &self.coeffs[i1][j1] * &other.coeffs[i2][j2];
                        }
                    }
                }
            }
        }
        out
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.coeffs[0][0] += c;
    }

    /// Substitute this series (constant term must vanish) into `f`.
    pub fn substitute_into(&self, f: &TruncatedSeries) -> Result<Self, FormalError> {
        if !self.coeffs[0][0].is_zero() {
            return Err(FormalError::CompositionAtUnit);
        }
        let cap = self.cap().min(f.cap());
        let mut acc = Self::zero(cap);
        acc.coeffs[0][0] = f.coeff(cap).clone();
        for i in (0..cap).rev() {
            acc = acc.multiply(self);
            acc.add_constant(f.coeff(i));
        }
        Ok(acc)
    }

    /// Swap the two variables.
    pub fn transpose(&self) -> Self {
        let cap = self.cap();
        let mut out = Self::zero(cap);
        for i in 0..=cap {
            for j in 0..=cap - i {
                out.coeffs[j][i] = self.coeffs[i][j].clone();
            }
        }
        out
    }
}

/// `l(t) = sum_n F_r(lambda)_n / (2n+1) t^{2n+1}` through degree `cap`.
pub fn hypergeometric_logarithm(r: u32, lambda: &Rational, cap: usize) -> TruncatedSeries {
    let mut coeffs = vec![Rational::zero(); cap + 1];
    let mut n = 0u64;
    while 2 * n + 1 <= cap as u64 {
        coeffs[(2 * n + 1) as usize] = f_r(lambda, r, n) / rat(2 * n as i64 + 1, 1);
        n += 1;
    }
    TruncatedSeries::new(coeffs, cap)
}

/// Coefficient `b_{r,n}(lambda)` of the companion logarithm: the terminating
/// `rFr-1(-n,..,-n; 1,..,1; .)` form, which collapses to
/// `sum_k binom(n,k)^r ((-1)^r lambda)^k`.
///
/// The sign is the one that makes the Frobenius-ratio limit of this sequence
/// agree with the hypergeometric one (checked numerically for r in {2,3}):
/// the native `(-1)^{rk}` of the rising factorials is kept, not cancelled.
pub fn stienstra_coefficient(r: u32, n: u64, lambda: &Rational) -> Rational {
    let z = if r % 2 == 1 { -lambda } else { lambda.clone() };
    let mut acc = Rational::zero();
    for k in 0..=n {
        acc += Rational::from_integer(binomial(n, k).pow(r)) * z.pow(k as i32);
    }
    acc
}

/// `sum_n b_{r,n}(lambda) / (2n+1) t^{2n+1}` through degree `cap`.
pub fn stienstra_logarithm(r: u32, lambda: &Rational, cap: usize) -> TruncatedSeries {
    let mut coeffs = vec![Rational::zero(); cap + 1];
    let mut n = 0u64;
    while 2 * n + 1 <= cap as u64 {
        coeffs[(2 * n + 1) as usize] =
            stienstra_coefficient(r, n, lambda) / rat(2 * n as i64 + 1, 1);
        n += 1;
    }
    TruncatedSeries::new(coeffs, cap)
}

/// `F(x,y) = l^{-1}(l(x) + l(y))` through total degree `cap`.
pub fn group_law(log: &TruncatedSeries, cap: usize) -> Result<TruncatedBiSeries, FormalError> {
    let inv = log.reversion()?;
    let lx = TruncatedBiSeries::from_univariate(log, false, cap);
    let ly = TruncatedBiSeries::from_univariate(log, true, cap);
    lx.add(&ly).substitute_into(&inv)
}

/// Minimum p-adic valuation over all coefficients of a group law.
#[derive(Clone, Debug)]
pub struct IntegralityReport {
    pub p: u64,
    pub cap: usize,
    pub min_valuation: ValuationResult,
    /// A monomial (i, j) realizing a negative valuation, if any.
    pub offending: Option<(usize, usize)>,
}

impl IntegralityReport {
    pub fn pass(&self) -> bool {
        self.min_valuation.is_at_least(0)
    }
}

pub fn integrality_report(f: &TruncatedBiSeries, p: u64) -> IntegralityReport {
    let cap = f.cap();
    let mut min = ValuationResult::Infinite;
    let mut offending = None;
    for i in 0..=cap {
        for j in 0..=cap - i {
            let v = valuation(f.coeff(i, j), p);
            min = min.min(v);
            if !v.is_at_least(0) && offending.is_none() {
                offending = Some((i, j));
            }
        }
    }
    IntegralityReport {
        p,
        cap,
        min_valuation: min,
        offending,
    }
}

/// Checks the Frobenius-ratio congruence
/// `a_{m p^s} = alpha * a_{m p^{s-1}} (mod p^s)` on a coefficient sequence.
pub fn fp_type_ratio(
    alpha: &PadicInt,
    seq: impl Fn(u64) -> Option<Rational>,
    p: u64,
    m: u64,
    s: u32,
) -> CongruenceReport {
    let params = param_list(&[
        ("p", p.to_string()),
        ("m", m.to_string()),
        ("s", s.to_string()),
    ]);
    let hi = m * p.pow(s);
    let lo = m * p.pow(s - 1);
    let (Some(a_hi), Some(a_lo)) = (seq(hi), seq(lo)) else {
        return CongruenceReport::skipped("fp_type_ratio", params, SkipReason::IndexOutOfRange);
    };
    let s_work = s + 2;
    let (Ok(a_hi), Ok(a_lo)) = (
        reduce_rational(&a_hi, p, s_work),
        reduce_rational(&a_lo, p, s_work),
    ) else {
        return CongruenceReport::skipped("fp_type_ratio", params, SkipReason::NotPIntegral);
    };
    let defect = a_hi
        .sub(&alpha.reduce_precision(s_work.min(alpha.precision())).mul(&a_lo))
        .valuation();
    CongruenceReport::concluded("fp_type_ratio", params, Claim::ModPk(s), defect, Some(s_work))
}
