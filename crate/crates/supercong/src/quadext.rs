//! The quadratic extension `(Z/p^s)[u] / (u^2 - t)` for a non-residue `t`.

use num_bigint::{BigInt, BigUint};

use crate::padic::{legendre_symbol, ArithError, PadicInt, PadicRing};
use crate::report::ValuationResult;

/// `a + b*u` with `u^2 = t`; `t` must be a quadratic non-residue mod p so the
/// reduction mod p is a field and the ring is a domain mod p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadExtElem {
    a: PadicInt,
    b: PadicInt,
    t: BigUint,
}

impl QuadExtElem {
    pub fn new(a: PadicInt, b: PadicInt, t: &BigInt) -> Result<Self, ArithError> {
        assert_eq!(a.prime(), b.prime(), "prime mismatch");
        let p = a.prime();
        if legendre_symbol(t, p) != -1 {
            return Err(ArithError::NotAUnit);
        }
        let s = a.precision().min(b.precision());
        let t = PadicInt::new(t, p, s);
        Ok(QuadExtElem {
            a: a.reduce_precision(s),
            b: b.reduce_precision(s),
            t: t.residue().clone(),
        })
    }

    /// Embed a base-ring element (b = 0).
    pub fn from_base(a: PadicInt, t: &BigInt) -> Result<Self, ArithError> {
        let zero = PadicInt::zero(a.prime(), a.precision());
        Self::new(a, zero, t)
    }

    /// The generator `u` itself, a square root of `t`.
    pub fn generator(t: &BigInt, p: u64, s: u32) -> Result<Self, ArithError> {
        Self::new(PadicInt::zero(p, s), PadicInt::one(p, s), t)
    }

    pub fn coord_a(&self) -> &PadicInt {
        &self.a
    }

    pub fn coord_b(&self) -> &PadicInt {
        &self.b
    }

    pub fn t_residue(&self) -> &BigUint {
        &self.t
    }

    fn t_elem(&self) -> PadicInt {
        PadicInt::new(&BigInt::from(self.t.clone()), self.a.prime(), self.a.precision())
    }

    pub fn conjugate(&self) -> Self {
        QuadExtElem {
            a: self.a.clone(),
            b: self.b.neg(),
            t: self.t.clone(),
        }
    }

    /// Norm to the base ring: `a^2 - t b^2`.
    pub fn norm(&self) -> PadicInt {
        self.a.square().sub(&self.t_elem().mul(&self.b.square()))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.t, other.t, "mixed extension parameters");
        // (a + bu)(c + du) = (ac + t bd) + (ad + bc) u
        let t = self.t_elem();
        QuadExtElem {
            a: self.a.mul(&other.a).add(&t.mul(&self.b.mul(&other.b))),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.a)),
            t: self.t.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.t, other.t, "mixed extension parameters");
        QuadExtElem {
            a: self.a.add(&other.a),
            b: self.b.add(&other.b),
            t: self.t.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.t, other.t, "mixed extension parameters");
        QuadExtElem {
            a: self.a.sub(&other.a),
            b: self.b.sub(&other.b),
            t: self.t.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        QuadExtElem {
            a: self.a.neg(),
            b: self.b.neg(),
            t: self.t.clone(),
        }
    }

    /// Inverse via the norm: `(a - bu) / N(a + bu)`. The element is a unit
    /// iff its norm is a unit.
    pub fn inv(&self) -> Result<Self, ArithError> {
        let n_inv = self.norm().inv()?;
        let c = self.conjugate();
        Ok(QuadExtElem {
            a: c.a.mul(&n_inv),
            b: c.b.mul(&n_inv),
            t: self.t.clone(),
        })
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        let mut bits = e.clone();
        while !num_traits::Zero::is_zero(&bits) {
            if bits.bit(0) {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            bits >>= 1;
        }
        acc
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        self.pow(&BigUint::from(e))
    }
}

impl PadicRing for QuadExtElem {
    fn prime(&self) -> u64 {
        self.a.prime()
    }
    fn precision(&self) -> u32 {
        self.a.precision()
    }
    fn zero_like(&self) -> Self {
        QuadExtElem {
            a: self.a.zero_like(),
            b: self.b.zero_like(),
            t: self.t.clone(),
        }
    }
    fn one_like(&self) -> Self {
        QuadExtElem {
            a: self.a.one_like(),
            b: self.b.zero_like(),
            t: self.t.clone(),
        }
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scalar_mul(&self, c: &PadicInt) -> Self {
        QuadExtElem {
            a: self.a.mul(c),
            b: self.b.mul(c),
            t: self.t.clone(),
        }
    }
    fn defect_valuation(&self) -> ValuationResult {
        self.a.valuation().min(self.b.valuation())
    }
}

impl std::fmt::Display for QuadExtElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} + {}*u (u^2={}, mod {}^{})",
            self.a.residue(),
            self.b.residue(),
            self.t,
            self.a.prime(),
            self.a.precision()
        )
    }
}

/// A square root of -1 in `Z/p^s` or in the extension by `t`:
/// directly via Hensel when p = 1 mod 4, else as `r*u` with `r^2 = -1/t`
/// (both -1 and t are non-residues, so -1/t is a residue).
pub fn sqrt_minus_one_ext(t: &BigInt, p: u64, s: u32) -> Result<QuadExtElem, ArithError> {
    let minus_one = PadicInt::from_i64(-1, p, s);
    if p % 4 == 1 {
        let i = crate::padic::hensel_sqrt(&minus_one)?;
        return QuadExtElem::from_base(i, t);
    }
    let t_elem = PadicInt::new(t, p, s);
    let r = crate::padic::hensel_sqrt(&minus_one.mul(&t_elem.inv()?))?;
    QuadExtElem::new(PadicInt::zero(p, s), r, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elem(a: i64, b: i64, t: i64, p: u64, s: u32) -> QuadExtElem {
        QuadExtElem::new(
            PadicInt::from_i64(a, p, s),
            PadicInt::from_i64(b, p, s),
            &BigInt::from(t),
        )
        .unwrap()
    }

    #[test]
    fn rejects_residue_parameter() {
        // 4 is a square mod 7
        assert!(QuadExtElem::new(
            PadicInt::from_i64(1, 7, 2),
            PadicInt::from_i64(1, 7, 2),
            &BigInt::from(4)
        )
        .is_err());
    }

    #[test]
    fn generator_squares_to_t() {
        let u = QuadExtElem::generator(&BigInt::from(3), 7, 3).unwrap();
        let sq = u.mul(&u);
        assert!(sq.coord_b().is_zero());
        assert_eq!(sq.coord_a(), &PadicInt::from_i64(3, 7, 3));
    }

    #[test]
    fn norm_multiplicative() {
        let xs = [
            elem(2, 3, 3, 7, 3),
            elem(5, 1, 3, 7, 3),
            elem(0, 4, 3, 7, 3),
            elem(6, 6, 3, 7, 3),
            elem(1, 0, 3, 7, 3),
        ];
        for x in &xs {
            for y in &xs {
                assert_eq!(x.mul(y).norm(), x.norm().mul(&y.norm()));
            }
        }
    }

    #[test]
    fn base_embedding_matches_padic() {
        let a = PadicInt::from_i64(9, 11, 2);
        let b = PadicInt::from_i64(5, 11, 2);
        let ea = QuadExtElem::from_base(a.clone(), &BigInt::from(2)).unwrap();
        let eb = QuadExtElem::from_base(b.clone(), &BigInt::from(2)).unwrap();
        let prod = ea.mul(&eb);
        assert!(prod.coord_b().is_zero());
        assert_eq!(prod.coord_a(), &a.mul(&b));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = elem(2, 3, 3, 7, 3);
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), x.one_like());
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let x = elem(2, 3, 3, 7, 3);
        let mut acc = x.one_like();
        for e in 0..12u64 {
            assert_eq!(x.pow_u64(e), acc);
            acc = acc.mul(&x);
        }
    }

    #[test]
    fn sqrt_minus_one_in_both_regimes() {
        // p = 13 = 1 mod 4: the root lives in the base ring.
        let i = sqrt_minus_one_ext(&BigInt::from(2), 13, 2).unwrap();
        assert!(i.coord_b().is_zero());
        assert_eq!(i.mul(&i), i.one_like().neg());
        // p = 7 = 3 mod 4: the root is r*u.
        let i = sqrt_minus_one_ext(&BigInt::from(3), 7, 2).unwrap();
        assert!(i.coord_a().is_zero());
        assert_eq!(i.mul(&i), i.one_like().neg());
    }

    #[test]
    fn defect_valuation_is_min_of_coords() {
        let x = elem(49, 7, 3, 7, 3);
        assert_eq!(x.defect_valuation(), ValuationResult::Finite(1));
        let z = elem(0, 0, 3, 7, 3);
        assert_eq!(z.defect_valuation(), ValuationResult::Infinite);
    }
}
