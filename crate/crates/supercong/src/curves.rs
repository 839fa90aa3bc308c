//! Point counts, traces, Hasse invariants, and unit roots for the Legendre
//! family `y^2 = x(x-1)(x-l)` and the CM family `y^2 = (x-1)(x^2 - 1/(1-l))`,
//! plus the affine character-sum counts behind the trace congruences.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::hyperseries::two_f1_neg_neg_mod;
use crate::padic::{hensel_unit_root, reduce_rational, ArithError, PadicInt};
use crate::rational::{rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveFamily {
    /// `L_l : y^2 = x(x-1)(x-l)`
    Legendre,
    /// `E_l : y^2 = (x-1)(x^2 - 1/(1-l))`
    Cm,
}

#[derive(Clone, Debug)]
pub struct CurveId {
    pub family: CurveFamily,
    pub lambda: Rational,
}

impl CurveId {
    pub fn legendre(lambda: Rational) -> Self {
        CurveId {
            family: CurveFamily::Legendre,
            lambda,
        }
    }

    pub fn cm(lambda: Rational) -> Self {
        CurveId {
            family: CurveFamily::Cm,
            lambda,
        }
    }
}

/// Everything the congruence checkers need about a curve at one prime.
#[derive(Clone, Debug)]
pub struct CurveLocalData {
    pub p: u64,
    pub count: u64,
    pub trace: i64,
    pub ordinary: bool,
    pub good_reduction: bool,
}

/// Quadratic-character lookup table: `chi[a] = legendre_symbol(a, p)`,
/// built by one pass over the squares.
fn chi_table(p: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for x in 1..p {
        chi[(x as u128 * x as u128 % p as u128) as usize] = 1;
    }
    chi
}

fn lambda_residue(lambda: &Rational, p: u64) -> Result<u64, ArithError> {
    let r = reduce_rational(lambda, p, 1)?;
    Ok(r.residue().to_u64().expect("p fits u64"))
}

pub fn good_reduction(curve: &CurveId, p: u64) -> bool {
    let Ok(l) = lambda_residue(&curve.lambda, p) else {
        return false;
    };
    match curve.family {
        CurveFamily::Legendre => l != 0 && l != 1,
        // shifted model X(X^2 + 2X - l/(1-l)): needs 1-l a unit and B != 0
        CurveFamily::Cm => l != 0 && l != 1,
    }
}

/// `#curve(F_p) = p + 1 + sum_x chi(f(x))` by the exhaustive character sum.
pub fn count_points(curve: &CurveId, p: u64) -> Result<CurveLocalData, ArithError> {
    assert!(p % 2 == 1, "odd p only");
    let l = lambda_residue(&curve.lambda, p)?;
    if !good_reduction(curve, p) {
        return Err(ArithError::BadReduction);
    }
    let chi = chi_table(p);
    let pw = p as u128;
    let mut sum: i64 = 0;
    match curve.family {
        CurveFamily::Legendre => {
            for x in 0..p as u128 {
                let f = x * ((x + pw - 1) % pw) % pw * ((x + pw - l as u128) % pw) % pw;
                sum += chi[f as usize] as i64;
            }
        }
        CurveFamily::Cm => {
            // c = 1/(1-l) mod p
            let c = PadicInt::from_i64(1 - l as i64, p, 1)
                .inv()?
                .residue()
                .to_u64()
                .expect("p fits u64") as u128;
            for x in 0..p as u128 {
                let f = ((x + pw - 1) % pw) * ((x * x % pw + pw - c % pw) % pw) % pw;
                sum += chi[f as usize] as i64;
            }
        }
    }
    let trace = -sum;
    let count = (p as i64 + 1 - trace) as u64;
    assert!((trace * trace) as u64 <= 4 * p, "Hasse bound violated");
    Ok(CurveLocalData {
        p,
        count,
        trace,
        ordinary: trace % p as i64 != 0,
        good_reduction: true,
    })
}

/// Hasse invariant of `L_l`:
/// `(-1)^{(p-1)/2} sum_i binom((p-1)/2, i)^2 l^i mod p`.
pub fn hasse_invariant(lambda: &Rational, p: u64) -> Result<PadicInt, ArithError> {
    let sum = two_f1_neg_neg_mod((p - 1) / 2, lambda, p, 1)?;
    Ok(if (p - 1) / 2 % 2 == 1 { sum.neg() } else { sum })
}

/// Unit root of `X^2 - trace X + p`; zero in the supersingular case.
pub fn unit_root(curve: &CurveId, p: u64, s: u32) -> Result<PadicInt, ArithError> {
    let data = count_points(curve, p)?;
    if !data.ordinary {
        return Ok(PadicInt::zero(p, s));
    }
    hensel_unit_root(&BigInt::from(data.trace), p, s)
}

/// Affine count of `W^2 = X_1..X_r (X_1-X_2)..(X_{r-1}-X_r)(X_r - l X_1)`
/// over `F_p`, reduced mod p (where it equals the plain character sum).
///
/// The count is `(-1)^r F_r(l)_{p-1} mod p`: each of the r variables
/// contributes a factor -1 when the power sums collapse, so the odd-r case
/// carries a sign the even-r (elliptic) case hides.
pub fn affine_variety_count_mod_p(r: u32, lambda: &Rational, p: u64) -> Result<PadicInt, ArithError> {
    assert!(r == 2 || r == 3, "only the surface and threefold cases");
    if r == 3 && p > 101 || r == 2 && p > 10_000 {
        return Err(ArithError::TooLarge);
    }
    let l = lambda_residue(lambda, p)? as u128;
    let chi = chi_table(p);
    let pw = p as u128;
    let mut sum: i64 = 0;
    if r == 2 {
        for x1 in 0..pw {
            for x2 in 0..pw {
                let f = x1 * x2 % pw * ((x1 + pw - x2) % pw) % pw
                    * ((x2 + pw - l * x1 % pw) % pw)
                    % pw;
                sum += chi[f as usize] as i64;
            }
        }
    } else {
        for x1 in 0..pw {
            let lx1 = l * x1 % pw;
            for x2 in 0..pw {
                let head = x1 * x2 % pw * ((x1 + pw - x2) % pw) % pw;
                if head == 0 {
                    continue;
                }
                for x3 in 0..pw {
                    let f = head * x3 % pw * ((x2 + pw - x3) % pw) % pw
                        * ((x3 + pw - lx1) % pw)
                        % pw;
                    sum += chi[f as usize] as i64;
                }
            }
        }
    }
    Ok(PadicInt::from_i64(sum, p, 1))
}

/// The K3 trace through the trace identity:
/// `chi(1 - l) (trace(E_l)^2 - p) mod p`.
pub fn k3_trace(lambda: &Rational, p: u64) -> Result<PadicInt, ArithError> {
    let data = count_points(&CurveId::cm(lambda.clone()), p)?;
    let chi = crate::padic::legendre_symbol_rational(&(Rational::one() - lambda), p)?;
    let val = PadicInt::from_i64(data.trace * data.trace - p as i64, p, 1);
    Ok(match chi {
        1 => val,
        -1 => val.neg(),
        _ => PadicInt::zero(p, 1),
    })
}

/// One entry of the CM catalog for the `E_l` family.
#[derive(Clone, Debug)]
pub struct CmCatalogEntry {
    pub lambda: Rational,
    /// `l = 1` makes the cubic degenerate; series checks still apply.
    pub degenerate: bool,
}

/// The eight CM values of the family, in a fixed order.
pub fn cm_catalog() -> Vec<CmCatalogEntry> {
    [
        rat(-8, 1),
        rat(1, 1),
        rat(-1, 8),
        rat(4, 1),
        rat(1, 4),
        rat(64, 1),
        rat(1, 64),
        rat(-1, 1),
    ]
    .into_iter()
    .map(|lambda| CmCatalogEntry {
        degenerate: lambda.is_one(),
        lambda,
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperseries::f_r_mod;
    use crate::rational::rat_int;
    use num_bigint::BigUint;

    #[test]
    fn legendre_count_anchor() {
        let data = count_points(&CurveId::legendre(rat_int(2)), 5).unwrap();
        assert_eq!(data.count, 8);
        assert_eq!(data.trace, -2);
        assert!(data.ordinary);
    }

    #[test]
    fn cm_count_supersingular_anchor() {
        let data = count_points(&CurveId::cm(rat_int(-1)), 7).unwrap();
        assert_eq!(data.count, 8);
        assert_eq!(data.trace, 0);
        assert!(!data.ordinary);
    }

    #[test]
    fn good_reduction_gates() {
        assert!(!good_reduction(&CurveId::legendre(rat_int(1)), 7));
        assert!(!good_reduction(&CurveId::legendre(rat_int(8)), 7));
        assert!(!good_reduction(&CurveId::cm(rat_int(64)), 7)); // 1 - 64 = -63
        assert!(good_reduction(&CurveId::cm(rat_int(-1)), 7));
        assert!(!good_reduction(&CurveId::cm(rat(1, 7)), 7)); // not 7-integral
    }

    #[test]
    fn hasse_bound_scan() {
        let mut p = 3u64;
        while p <= 199 {
            if (2..p).all(|d| d * d > p || p % d != 0) {
                for lv in [2i64, 3, 5, -1] {
                    for curve in [
                        CurveId::legendre(rat_int(lv)),
                        CurveId::cm(rat_int(lv)),
                    ] {
                        if good_reduction(&curve, p) {
                            let d = count_points(&curve, p).unwrap();
                            assert!((d.trace * d.trace) as u64 <= 4 * p, "p={p} l={lv}");
                        }
                    }
                }
            }
            p += 2;
        }
    }

    #[test]
    fn quadratic_twist_traces_cancel() {
        // twisting by a non-residue flips every chi value, so the traces
        // of a curve and its twist sum to zero; check via the raw sum
        for p in [7u64, 11, 13, 23] {
            let chi = chi_table(p);
            let d = (1..p).find(|&d| chi[d as usize] == -1).unwrap() as u128;
            let pw = p as u128;
            let l = 2u128;
            let mut plain = 0i64;
            let mut twisted = 0i64;
            for x in 0..pw {
                let f = x * ((x + pw - 1) % pw) % pw * ((x + pw - l) % pw) % pw;
                plain += chi[f as usize] as i64;
                twisted += chi[(d * f % pw) as usize] as i64;
            }
            assert_eq!(plain + twisted, 0, "p={p}");
        }
    }

    #[test]
    fn hasse_invariant_matches_trace() {
        let v = hasse_invariant(&rat_int(2), 5).unwrap();
        assert_eq!(v.residue(), &BigUint::from(3u32)); // trace -2 = 3 mod 5
        let mut p = 3u64;
        while p <= 101 {
            if (2..p).all(|d| d * d > p || p % d != 0) {
                for lv in 2i64..=10 {
                    let curve = CurveId::legendre(rat_int(lv));
                    if !good_reduction(&curve, p) {
                        continue;
                    }
                    let data = count_points(&curve, p).unwrap();
                    let h = hasse_invariant(&rat_int(lv), p).unwrap();
                    assert_eq!(h, PadicInt::from_i64(data.trace, p, 1), "p={p} l={lv}");
                    // and the series form with the sign folded out front
                    let f2 = f_r_mod(&rat_int(lv), 2, (p - 1) / 2, p, 1).unwrap();
                    let signed = if (p - 1) / 2 % 2 == 1 { f2.neg() } else { f2 };
                    assert_eq!(h, signed, "series form p={p} l={lv}");
                }
            }
            p += 2;
        }
    }

    #[test]
    fn unit_root_anchor() {
        // L_2 at p = 5: trace -2, unit root of X^2 + 2X + 5 mod 25 is 13
        let a = unit_root(&CurveId::legendre(rat_int(2)), 5, 2).unwrap();
        assert_eq!(a.residue(), &BigUint::from(13u32));
        // Viete: a + p/a = trace
        let data = count_points(&CurveId::legendre(rat_int(2)), 5).unwrap();
        let lhs = a.mul(&PadicInt::from_i64(data.trace, 5, 2).sub(&a));
        assert_eq!(lhs, PadicInt::from_u64(5, 5, 2));
        // supersingular convention: zero
        let z = unit_root(&CurveId::cm(rat_int(-1)), 7, 2).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn affine_count_matches_series() {
        let c = affine_variety_count_mod_p(2, &rat_int(2), 5).unwrap();
        assert_eq!(c, f_r_mod(&rat_int(2), 2, 4, 5, 1).unwrap());
        let c = affine_variety_count_mod_p(3, &rat_int(2), 11).unwrap();
        assert_eq!(c.neg(), f_r_mod(&rat_int(2), 3, 10, 11, 1).unwrap());
        assert_eq!(c.neg(), f_r_mod(&rat_int(2), 3, 5, 11, 1).unwrap());
        assert!(affine_variety_count_mod_p(3, &rat_int(2), 103).is_err());
    }

    #[test]
    fn k3_trace_anchors() {
        let v = k3_trace(&rat_int(-1), 7).unwrap();
        assert!(v.is_zero());
        assert_eq!(f_r_mod(&rat_int(-1), 3, 3, 7, 1).unwrap(), v);
        // p = 11, lambda = 64: matches the truncated series mod p
        let v = k3_trace(&rat_int(64), 11).unwrap();
        assert_eq!(v, f_r_mod(&rat_int(64), 3, 5, 11, 1).unwrap());
    }

    #[test]
    fn catalog_contents() {
        let cat = cm_catalog();
        assert_eq!(cat.len(), 8);
        assert!(cat.iter().any(|e| e.lambda == rat_int(64)));
        assert!(cat.iter().any(|e| e.lambda == rat_int(-1)));
        assert!(cat.iter().any(|e| e.lambda == rat(1, 64)));
        assert_eq!(cat.iter().filter(|e| e.degenerate).count(), 1);
    }
}
