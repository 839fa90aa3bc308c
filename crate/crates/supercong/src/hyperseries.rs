//! Truncated hypergeometric sums, Legendre polynomials, eta-product
//! q-expansions, Apery numbers, and harmonic-weighted auxiliary sums.
//!
//! Every sum has an exact rational evaluator and, where scans need it, a
//! modular evaluator driven by term-ratio recurrences that track p-powers
//! explicitly (so no division by p ever happens in the residue ring).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::padic::{reduce_rational, ArithError, PadicInt, PadicRing, Split};
use crate::rational::{binomial, central_binomial, harmonic, rat, Rational};
use crate::report::{param_list, Claim, CongruenceReport};

/// Parameters of a truncated `rFr-1(a_1..a_r; b_1..b_{r-1}; lambda)_n`.
#[derive(Clone, Debug)]
pub struct HGParams {
    pub upper: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub lambda: Rational,
    pub truncation: u64,
}

impl HGParams {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>, lambda: Rational, n: u64) -> Self {
        assert_eq!(upper.len(), lower.len() + 1, "need r upper, r-1 lower");
        for b in &lower {
            assert!(
                !(b.is_integer() && *b.numer() <= BigInt::zero()),
                "lower parameter is a non-positive integer"
            );
        }
        HGParams {
            upper,
            lower,
            lambda,
            truncation: n,
        }
    }
}

/// Parameters of `F_r(lambda)_n` = `rFr-1(1/2,..,1/2; 1,..,1; lambda)_n`.
pub fn f_r_params(lambda: Rational, r: u32, n: u64) -> HGParams {
    HGParams::new(
        vec![rat(1, 2); r as usize],
        vec![Rational::one(); (r - 1) as usize],
        lambda,
        n,
    )
}

/// Exact truncated hypergeometric sum.
pub fn truncated_hg(params: &HGParams) -> Rational {
    let mut term = Rational::one();
    let mut acc = Rational::one();
    for k in 0..params.truncation {
        let kq = Rational::from_integer(BigInt::from(k));
        let mut ratio = params.lambda.clone() / (&kq + Rational::one());
        for a in &params.upper {
            ratio *= a + &kq;
        }
        for b in &params.lower {
            ratio /= b + &kq;
        }
        if ratio.is_zero() {
            break;
        }
        term *= ratio;
        acc += &term;
    }
    acc
}

/// Modular truncated hypergeometric sum, never materializing big rationals.
///
/// Terms are carried as `p^e * unit`; if a term's valuation goes negative the
/// evaluation falls back to the exact path (cancellation may still make the
/// sum p-integral).
pub fn truncated_hg_mod(params: &HGParams, p: u64, s: u32) -> Result<PadicInt, ArithError> {
    let mut term = Split::one(p, s);
    let mut acc = PadicInt::one(p, s);
    for k in 0..params.truncation {
        let kq = Rational::from_integer(BigInt::from(k));
        let mut ratio = params.lambda.clone() / (&kq + Rational::one());
        for a in &params.upper {
            ratio *= a + &kq;
        }
        for b in &params.lower {
            ratio /= b + &kq;
        }
        if ratio.is_zero() {
            break;
        }
        term = term.mul_split(&Split::from_rational(&ratio, p, s)?);
        if term.exp < 0 {
            return reduce_rational(&truncated_hg(params), p, s);
        }
        acc = acc.add(&term.to_padic()?);
    }
    Ok(acc)
}

/// Coefficient of `lambda^n` in `F_r`: `(binom(2n,n)/4^n)^r`.
pub fn f_r_coeff(r: u32, n: u64) -> Rational {
    Rational::new(central_binomial(n), BigInt::from(4u8).pow(n as u32)).pow(r as i32)
}

/// Exact `F_r(lambda)_n`.
pub fn f_r(lambda: &Rational, r: u32, n: u64) -> Rational {
    let mut term = Rational::one();
    let mut acc = Rational::one();
    for k in 0..n {
        // term ratio: ((2k+1) / (2k+2))^r * lambda
        let step = rat(2 * k as i64 + 1, 2 * k as i64 + 2).pow(r as i32);
        term *= step * lambda;
        acc += &term;
    }
    acc
}

/// Modular `F_r(lambda)_n`; terms are p-integral for odd p and p-integral
/// lambda, so no fallback is ever needed.
pub fn f_r_mod(lambda: &Rational, r: u32, n: u64, p: u64, s: u32) -> Result<PadicInt, ArithError> {
    assert!(p % 2 == 1, "odd p only");
    if lambda.is_zero() {
        return Ok(PadicInt::one(p, s));
    }
    let lam = Split::from_rational(lambda, p, s)?;
    if lam.exp < 0 {
        return Err(ArithError::NotPIntegral);
    }
    let mut term = Split::one(p, s);
    let mut acc = PadicInt::one(p, s);
    for k in 0..n {
        term = term.mul_split(&lam);
        for _ in 0..r {
            term.mul_int(2 * k as i64 + 1);
            term.div_int(2 * k as i64 + 2);
        }
        debug_assert!(term.exp >= 0);
        acc = acc.add(&term.to_padic()?);
        if term.exp as u32 >= s && lam.exp > 0 {
            break; // all later terms vanish at this precision
        }
    }
    Ok(acc)
}

/// Exact Legendre polynomial value by the three-term recurrence.
pub fn legendre_poly(n: u64, x: &Rational) -> Rational {
    let mut prev = Rational::one();
    if n == 0 {
        return prev;
    }
    let mut cur = x.clone();
    for m in 1..n {
        // (m+1) P_{m+1} = (2m+1) x P_m - m P_{m-1}
        let next = (rat(2 * m as i64 + 1, m as i64 + 1) * x * &cur)
            - rat(m as i64, m as i64 + 1) * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Legendre polynomial in a residue ring, for indices far beyond where the
/// recurrence's division by (m+1) stays away from p.
///
/// Uses the division-free expansion
/// `2^n P_n(x) = sum_k binom(n,k)^2 (x-1)^{n-k} (x+1)^k`,
/// read as a Horner scheme in (x-1); only the unit 2^n is ever inverted.
pub fn legendre_poly_mod<R: PadicRing>(n: u64, x: &R) -> R {
    let p = x.prime();
    let s = x.precision();
    assert!(p % 2 == 1, "odd p only");
    let one = x.one_like();
    let xm = x.sub_ref(&one);
    let xp = x.add_ref(&one);
    // Walk i = n-j from 0 to n: d_i = binom(n,i)^2 (x+1)^i, acc = acc*(x-1) + d_i.
    let mut binom_split = Split::one(p, s);
    let mut xp_pow = x.one_like();
    let mut acc = x.zero_like();
    for i in 0..=n {
        if i > 0 {
            binom_split.mul_int((n - i + 1) as i64);
            binom_split.div_int(i as i64);
            xp_pow = xp_pow.mul_ref(&xp);
        }
        let coeff = binom_split
            .pow_u32(2)
            .to_padic()
            .expect("binomials are integers");
        acc = acc.mul_ref(&xm).add_ref(&xp_pow.scalar_mul(&coeff));
    }
    let half = PadicInt::from_u64(2, p, s).inv().expect("2 is a unit");
    let scale = half.pow(&num_bigint::BigUint::from(n));
    acc.scalar_mul(&scale)
}

/// The odd-index expansion coefficient `a_{2j+1} = P_j((1+l)/(1-l)) (l-1)^j`
/// in closed form `(-1)^j sum_i binom(j,i)^2 lambda^i`, valid even when
/// `1 - lambda` is not invertible.
pub fn asd_coefficient_mod(j: u64, lambda: &PadicInt) -> PadicInt {
    let p = lambda.prime();
    let s = lambda.precision();
    let mut binom_split = Split::one(p, s);
    let mut lam_pow = PadicInt::one(p, s);
    let mut acc = PadicInt::zero(p, s);
    for i in 0..=j {
        if i > 0 {
            binom_split.mul_int((j - i + 1) as i64);
            binom_split.div_int(i as i64);
            lam_pow = lam_pow.mul(lambda);
        }
        let c = binom_split
            .pow_u32(2)
            .to_padic()
            .expect("binomials are integers");
        acc = acc.add(&c.mul(&lam_pow));
    }
    if j % 2 == 1 {
        acc.neg()
    } else {
        acc
    }
}

/// The two terminating 2F1 forms of the odd expansion coefficients:
/// `2F1(-k,-k;1;l) (-1)^k` and `2F1(-k,1+k;1;-l/(1-l)) (l-1)^k`,
/// both equal to `P_k((1+l)/(1-l)) (l-1)^k`.
pub fn terminating_2f1_pair(k: u64, lambda: &Rational) -> Result<(Rational, Rational), ArithError> {
    if lambda == &Rational::one() {
        return Err(ArithError::NotAUnit); // degenerate lambda = 1
    }
    // 2F1(-k,-k;1;l) = sum binom(k,j)^2 l^j
    let mut first = Rational::zero();
    for j in 0..=k {
        first += Rational::from_integer(binomial(k, j).pow(2)) * lambda.pow(j as i32);
    }
    if k % 2 == 1 {
        first = -first;
    }
    // 2F1(-k,1+k;1;z) = sum (-1)^j binom(k,j) binom(k+j,j) z^j at z = -l/(1-l)
    let z = -lambda / (Rational::one() - lambda);
    let mut second = Rational::zero();
    for j in 0..=k {
        let c = Rational::from_integer(binomial(k, j) * binomial(k + j, j)) * z.pow(j as i32);
        if j % 2 == 0 {
            second += c;
        } else {
            second -= c;
        }
    }
    second *= (lambda - Rational::one()).pow(k as i32);
    Ok((first, second))
}

/// `sum_{k<=n} binom(2k,k)^2 binom(n+k,2k) (-lambda/4)^k`, the terminating
/// 3F2 with parameters ((1-N)/2, 1/2, (1+N)/2) at N = 2n+1.
pub fn zh_sun_3f2(n: u64, lambda: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let z = -lambda / rat(4, 1);
    for k in 0..=n {
        acc += Rational::from_integer(central_binomial(k).pow(2) * binomial(n + k, 2 * k))
            * z.pow(k as i32);
    }
    acc
}

/// Modular evaluation of [`zh_sun_3f2`] by term ratio with p-power tracking.
pub fn zh_sun_3f2_mod(n: u64, lambda: &Rational, p: u64, s: u32) -> Result<PadicInt, ArithError> {
    assert!(p % 2 == 1, "odd p only");
    if lambda.is_zero() {
        return Ok(PadicInt::one(p, s));
    }
    let lam = Split::from_rational(lambda, p, s)?;
    if lam.exp < 0 {
        return Err(ArithError::NotPIntegral);
    }
    let mut term = Split::one(p, s);
    let mut acc = PadicInt::one(p, s);
    for k in 0..n {
        // ratio = -l (2k+1)(2k+2)(n+k+1)(n-k) / (4 (k+1)^4)
        term = term.mul_split(&lam);
        term.mul_int(-(2 * k as i64 + 1));
        term.mul_int(2 * k as i64 + 2);
        term.mul_int((n + k + 1) as i64);
        term.mul_int((n - k) as i64);
        term.div_int(4);
        for _ in 0..4 {
            term.div_int(k as i64 + 1);
        }
        debug_assert!(term.exp >= 0);
        acc = acc.add(&term.to_padic()?);
    }
    Ok(acc)
}

/// `2F1(-n,-n;1;lambda) = sum binom(n,k)^2 lambda^k` in `Z/p^s`.
pub fn two_f1_neg_neg_mod(
    n: u64,
    lambda: &Rational,
    p: u64,
    s: u32,
) -> Result<PadicInt, ArithError> {
    assert!(p % 2 == 1, "odd p only");
    if lambda.is_zero() {
        return Ok(PadicInt::one(p, s));
    }
    let lam = Split::from_rational(lambda, p, s)?;
    if lam.exp < 0 {
        return Err(ArithError::NotPIntegral);
    }
    let mut term = Split::one(p, s);
    let mut acc = PadicInt::one(p, s);
    for k in 0..n {
        term = term.mul_split(&lam);
        term.mul_int((n - k) as i64);
        term.mul_int((n - k) as i64);
        term.div_int(k as i64 + 1);
        term.div_int(k as i64 + 1);
        acc = acc.add(&term.to_padic()?);
    }
    Ok(acc)
}

/// `2F1(-n,1+n;1;lambda) = sum (-1)^k binom(n,k) binom(n+k,k) lambda^k`
/// in `Z/p^s`.
pub fn two_f1_neg_pos_mod(
    n: u64,
    lambda: &Rational,
    p: u64,
    s: u32,
) -> Result<PadicInt, ArithError> {
    assert!(p % 2 == 1, "odd p only");
    if lambda.is_zero() {
        return Ok(PadicInt::one(p, s));
    }
    let lam = Split::from_rational(lambda, p, s)?;
    if lam.exp < 0 {
        return Err(ArithError::NotPIntegral);
    }
    let mut term = Split::one(p, s);
    let mut acc = PadicInt::one(p, s);
    for k in 0..n {
        term = term.mul_split(&lam);
        term.mul_int(-((n - k) as i64));
        term.mul_int((n + k + 1) as i64);
        term.div_int(k as i64 + 1);
        term.div_int(k as i64 + 1);
        acc = acc.add(&term.to_padic()?);
    }
    Ok(acc)
}

/// Checks `binom((p-1)/2 + k, 2k) = (-1/16)^k binom(2k,k) (mod p^2)`.
pub fn binom_half_congruence(k: u64, p: u64) -> CongruenceReport {
    assert!(k <= (p - 1) / 2);
    let s_work = 4u32;
    let lhs = PadicInt::new(&binomial((p - 1) / 2 + k, 2 * k), p, s_work);
    let scale = reduce_rational(&rat(-1, 16).pow(k as i32), p, s_work).expect("16 is a p-unit");
    let rhs = PadicInt::new(&central_binomial(k), p, s_work).mul(&scale);
    let defect = lhs.sub(&rhs).valuation();
    CongruenceReport::concluded(
        "binom_half",
        param_list(&[("p", p.to_string()), ("k", k.to_string())]),
        Claim::ModPk(2),
        defect,
        Some(s_work),
    )
}

fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Power-series inverse of a polynomial with constant term 1.
fn poly_inv_trunc(a: &[BigInt], len: usize) -> Vec<BigInt> {
    assert!(a[0].is_one());
    let mut out = vec![BigInt::zero(); len];
    out[0] = BigInt::one();
    for i in 1..len {
        let mut acc = BigInt::zero();
        for j in 1..=i.min(a.len() - 1) {
            acc += &a[j] * &out[i - j];
        }
        out[i] = -acc;
    }
    out
}

/// A finite product of eta factors `eta(dz)^e`, expanded as a q-series.
#[derive(Clone, Debug)]
pub struct EtaProductSpec {
    factors: Vec<(u64, i64)>,
    lead: u64,
}

impl EtaProductSpec {
    /// `sum d*e` must be a positive multiple of 24 (the leading q-power).
    pub fn new(factors: &[(u64, i64)]) -> Self {
        let total: i64 = factors.iter().map(|&(d, e)| d as i64 * e).sum();
        assert!(total > 0 && total % 24 == 0, "leading power must be a positive integer");
        EtaProductSpec {
            factors: factors.to_vec(),
            lead: (total / 24) as u64,
        }
    }

    pub fn lead(&self) -> u64 {
        self.lead
    }

    /// Coefficients of `q^lead * prod_{d,e} prod_{n>=1} (1-q^{dn})^e`
    /// through `q^N`; index = q-power.
    pub fn coefficients(&self, n_max: u64) -> Vec<BigInt> {
        let len = (n_max + 1) as usize;
        let inner = len.saturating_sub(self.lead as usize);
        let mut prod = vec![BigInt::zero(); inner.max(1)];
        prod[0] = BigInt::one();
        for &(d, e) in &self.factors {
            let mut base = vec![BigInt::zero(); inner.max(1)];
            base[0] = BigInt::one();
            let mut m = d as usize;
            while m < inner {
                // multiply by (1 - q^m) in place
                for i in (m..inner).rev() {
                    let t = base[i - m].clone();
                    base[i] -= t;
                }
                m += d as usize;
            }
            let factor = if e < 0 {
                poly_inv_trunc(&base, inner.max(1))
            } else {
                base
            };
            for _ in 0..e.unsigned_abs() {
                prod = poly_mul_trunc(&prod, &factor, inner.max(1));
            }
        }
        let mut out = vec![BigInt::zero(); len];
        for (i, c) in prod.into_iter().enumerate() {
            let idx = i + self.lead as usize;
            if idx < len {
                out[idx] = c;
            }
        }
        out
    }
}

pub fn eta_4z_6() -> EtaProductSpec {
    EtaProductSpec::new(&[(4, 6)])
}

pub fn eta_z3_7z3() -> EtaProductSpec {
    EtaProductSpec::new(&[(1, 3), (7, 3)])
}

pub fn eta_2z4_4z4() -> EtaProductSpec {
    EtaProductSpec::new(&[(2, 4), (4, 4)])
}

/// `c_n = sum_k binom(n,k)^2 binom(n+k,k)^2`.
pub fn apery_half(n: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for k in 0..=n {
        acc += (binomial(n, k) * binomial(n + k, k)).pow(2);
    }
    acc
}

/// `b_n = 2 sum_k binom(n,k)^2 binom(n+k,k)^2 (H_{n+k} - H_{n-k})`.
pub fn gessel_aux(n: u64) -> Rational {
    let mut acc = Rational::zero();
    for k in 0..=n {
        let c = (binomial(n, k) * binomial(n + k, k)).pow(2);
        acc += Rational::from_integer(c) * (harmonic(n + k) - harmonic(n - k));
    }
    acc * rat(2, 1)
}

/// One point of the auxiliary sequence attached to
/// `a_n = sum binom(2i,i)^3 (l/64)^i`:
/// `b_n = sum binom(2i,i)^3 (l/64)^i (6(H_{2i}-H_i) + ((l/64)^{p-1}-1)/p)`.
#[derive(Clone, Debug)]
pub struct AuxSequencePoint {
    pub index: u64,
    pub value: Rational,
    pub aux: Rational,
}

pub fn aux_sequence(lambda: &Rational, p: u64, n: u64) -> Result<AuxSequencePoint, ArithError> {
    let x = lambda / rat(64, 1);
    let split = Split::from_rational(&x, p, 1).map_err(|_| ArithError::NotAUnit)?;
    if split.exp != 0 {
        return Err(ArithError::NotAUnit);
    }
    // Fermat quotient of the unit x, p-integral by Fermat's little theorem
    let quotient = (x.pow((p - 1) as i32) - Rational::one()) / rat(p as i64, 1);
    let mut value = Rational::zero();
    let mut aux = Rational::zero();
    for i in 0..=n {
        let term = Rational::from_integer(central_binomial(i).pow(3)) * x.pow(i as i32);
        let weight = rat(6, 1) * (harmonic(2 * i) - harmonic(i)) + &quotient;
        value += &term;
        aux += term * weight;
    }
    Ok(AuxSequencePoint {
        index: n,
        value,
        aux,
    })
}
