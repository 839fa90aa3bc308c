//! Exact rational arithmetic helpers: valuations, harmonic sums, binomials.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::report::ValuationResult;

/// Arbitrary-precision fraction, always in lowest terms with positive
/// denominator (the `num-rational` invariants match ours exactly).
pub type Rational = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u64;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        m = q;
    }
}

/// p-adic valuation of a rational: `ord_p(num) - ord_p(den)`, infinite for 0.
pub fn valuation(x: &Rational, p: u64) -> ValuationResult {
    if x.is_zero() {
        return ValuationResult::Infinite;
    }
    let vn = int_valuation(x.numer(), p).expect("nonzero numerator") as i64;
    let vd = int_valuation(x.denom(), p).expect("nonzero denominator") as i64;
    ValuationResult::Finite(vn - vd)
}

/// Exact harmonic sum `H_k = sum_{j=1}^k 1/j`; `H_0 = 0`.
pub fn harmonic(k: u64) -> Rational {
    let mut acc = Rational::zero();
    for j in 1..=k {
        acc += Rational::new(BigInt::one(), BigInt::from(j));
    }
    acc
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    BigInt::from(acc)
}

/// Central binomial coefficient `C(2k, k)`.
pub fn central_binomial(k: u64) -> BigInt {
    binomial(2 * k, k)
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`; `(a)_0 = 1`.
pub fn pochhammer(a: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut f = a.clone();
    for _ in 0..k {
        acc *= &f;
        f += Rational::one();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&rat(25, 12), 5), ValuationResult::Finite(2));
        assert_eq!(valuation(&rat_int(0), 7), ValuationResult::Infinite);
        assert_eq!(valuation(&rat(27, 512), 2), ValuationResult::Finite(-9));
    }

    #[test]
    fn valuation_multiplicative() {
        let xs = [rat(25, 12), rat(7, 10), rat(-50, 3), rat(12, 35)];
        for a in &xs {
            for b in &xs {
                let va = valuation(a, 5).finite().unwrap();
                let vb = valuation(b, 5).finite().unwrap();
                assert_eq!(
                    valuation(&(a * b), 5),
                    ValuationResult::Finite(va + vb),
                    "val(xy) = val(x) + val(y)"
                );
            }
        }
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic(0), Rational::zero());
        assert_eq!(harmonic(3), rat(11, 6));
        assert_eq!(harmonic(4), rat(25, 12));
        // Wolstenholme instance: H_4 has 5-adic valuation 2.
        assert_eq!(valuation(&harmonic(4), 5), ValuationResult::Finite(2));
    }

    #[test]
    fn wolstenholme_small_primes() {
        // H_{p-1} = 0 mod p^2 for primes p >= 5.
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
        {
            assert!(
                valuation(&harmonic(p - 1), p).is_at_least(2),
                "H_{{p-1}} mod p^2 at p={p}"
            );
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&rat(1, 2), 0), Rational::one());
        assert_eq!(pochhammer(&rat(1, 2), 3), rat(15, 8));
        assert_eq!(pochhammer(&rat_int(-2), 4), Rational::zero());
    }

    #[test]
    fn central_binomial_pochhammer_identity() {
        // ((1/2)_k / k!)^3 = C(2k,k)^3 / 64^k, exactly, for k <= 50.
        let half = rat(1, 2);
        for k in 0..=50u64 {
            let lhs = pochhammer(&half, k) / pochhammer(&Rational::one(), k);
            let rhs = Rational::new(central_binomial(k), BigInt::from(4u8).pow(k as u32));
            assert_eq!(lhs.pow(3), rhs.pow(3));
        }
    }
}
