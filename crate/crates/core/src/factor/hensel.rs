//! Hensel lifting of a mod-p factorization to a prime-power modulus large
//! enough for factor recombination over the integers.
//!
//! Follows the classical quadratic two-factor step (von zur Gathen & Gerhard,
//! "Modern Computer Algebra", Alg. 15.10) arranged as a balanced factor tree
//! (Alg. 15.17). Coefficients are arbitrary-precision integers reduced into
//! [0, m); the right-hand factor of every split stays monic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::zp::ZpPoly;

/// Monic factors of `f` modulo `modulus`, with f = lc(f)·prod(factors).
pub(crate) struct LiftedFactorization {
    pub modulus: BigInt,
    pub factors: Vec<Vec<BigInt>>,
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn norm(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    trim(v.iter().map(|c| c.mod_floor(m)).collect())
}

fn add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero)
            + b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out.push(x.mod_floor(m));
    }
    trim(out)
}

fn sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero)
            - b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out.push(x.mod_floor(m));
    }
    trim(out)
}

pub(crate) fn mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    norm(&out, m)
}

/// Division with remainder by a monic divisor; valid over Z/m for any m.
fn divrem_monic(a: &[BigInt], d: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    debug_assert!(d.last().is_some_and(|c| c.is_one()), "divisor must be monic");
    let dd = d.len() - 1;
    if a.len() < d.len() {
        return (Vec::new(), a.to_vec());
    }
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - dd];
    for k in (0..quot.len()).rev() {
        let q = std::mem::take(&mut rem[k + dd]);
        if q.is_zero() {
            continue;
        }
        for (i, dc) in d.iter().take(dd).enumerate() {
            let t = (&rem[k + i] - dc * &q).mod_floor(m);
            rem[k + i] = t;
        }
        quot[k] = q;
    }
    (trim(quot), trim(rem))
}

/// Inverse of a unit mod m (m a prime power here, a coprime to it).
fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "non-unit in modinv");
    e.x.mod_floor(m)
}

fn scale(a: &[BigInt], k: &BigInt, m: &BigInt) -> Vec<BigInt> {
    trim(a.iter().map(|c| (c * k).mod_floor(m)).collect())
}

/// One quadratic step: from f = g·h and s·g + t·h = 1 (mod m) to the same
/// relations mod m^2, with h kept monic and all degrees preserved.
#[allow(clippy::type_complexity)]
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m2: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
    let f = norm(f, m2);
    let e = sub(&f, &mul(g, h, m2), m2);
    let (q, r) = divrem_monic(&mul(s, &e, m2), h, m2);
    let g1 = add(&add(g, &mul(t, &e, m2), m2), &mul(&q, g, m2), m2);
    let h1 = add(h, &r, m2);
    let b = sub(&add(&mul(s, &g1, m2), &mul(t, &h1, m2), m2), &[BigInt::one()], m2);
    let (c, d) = divrem_monic(&mul(s, &b, m2), &h1, m2);
    let s1 = sub(s, &d, m2);
    let t1 = sub(&sub(t, &mul(t, &b, m2), m2), &mul(&c, &g1, m2), m2);
    (g1, h1, s1, t1)
}

fn zp_to_big(z: &ZpPoly) -> Vec<BigInt> {
    z.c.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lifts f = lc(f)·prod(monic factors) from mod p to mod `modulus`
/// (a power p^(2^d) chosen by the caller as the doubling target).
///
/// `steps` is the number of quadratic doublings: modulus = p^(2^steps).
fn lift_rec(
    f: &[BigInt],
    factors: &[ZpPoly],
    p: u64,
    steps: u32,
    modulus: &BigInt,
) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        // normalize monic mod the final modulus; lc(f) is a unit (p does not
        // divide the original leading coefficient)
        let f = norm(f, modulus);
        let lc = f.last().expect("nonzero").clone();
        return vec![scale(&f, &modinv(&lc, modulus), modulus)];
    }
    let k = factors.len().div_ceil(2);
    let (left, right) = factors.split_at(k);

    let bp = BigInt::from(p);
    let f_mod_p = norm(f, &bp);
    let lc_mod_p = f_mod_p.last().expect("lc nonzero mod p").clone();
    let mut g0 = ZpPoly::new(
        p,
        vec![u64::try_from(&lc_mod_p).expect("reduced below p")],
    );
    for u in left {
        g0 = g0.mul(u);
    }
    let mut h0 = ZpPoly::one(p);
    for u in right {
        h0 = h0.mul(u);
    }
    let (one, s0, t0) = ZpPoly::eea(&g0, &h0);
    debug_assert!(one.is_one(), "split halves must be coprime mod p");

    let mut g = zp_to_big(&g0);
    let mut h = zp_to_big(&h0);
    let mut s = zp_to_big(&s0);
    let mut t = zp_to_big(&t0);
    let mut m = bp;
    for _ in 0..steps {
        let m2 = &m * &m;
        let (g1, h1, s1, t1) = hensel_step(f, &g, &h, &s, &t, &m2);
        g = g1;
        h = h1;
        s = s1;
        t = t1;
        m = m2;
    }
    debug_assert_eq!(&m, modulus);

    let mut out = lift_rec(&g, left, p, steps, modulus);
    out.extend(lift_rec(&h, right, p, steps, modulus));
    out
}

/// Lifts the factorization until the modulus exceeds `coeff_span`
/// (callers pass 2B+ for a coefficient bound B, so symmetric representatives
/// mod the result recover any true factor exactly).
pub(crate) fn lift_factorization(
    f_coeffs: &[BigInt],
    factors: &[ZpPoly],
    p: u64,
    coeff_span: &BigInt,
) -> LiftedFactorization {
    let mut modulus = BigInt::from(p);
    let mut steps = 0u32;
    while modulus <= *coeff_span {
        modulus = &modulus * &modulus;
        steps += 1;
    }
    let factors = lift_rec(f_coeffs, factors, p, steps, &modulus);
    LiftedFactorization { modulus, factors }
}

/// Symmetric representative in (-m/2, m/2].
pub(crate) fn symmetric(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    trim(
        v.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    #[test]
    fn lift_two_factors_recovers_product() {
        // f = (3X + 1)(X + 4) = 3X^2 + 13X + 4, squarefree mod 5
        let f = IntPoly::from_i64(&[4, 13, 3]);
        let fb = f.coeffs().to_vec();
        let fp = ZpPoly::new(5, f.coeffs_mod(5));
        assert!(fp.is_squarefree());
        let factors = crate::factor::zp::factor_monic_squarefree(&fp.make_monic());
        assert_eq!(factors.len(), 2);
        let lifted = lift_factorization(&fb, &factors, 5, &BigInt::from(1000));
        assert!(lifted.modulus > BigInt::from(1000));
        // product of lc(f)·monic factors reproduces f mod modulus
        let mut prod = vec![BigInt::from(3)];
        for u in &lifted.factors {
            prod = mul(&prod, u, &lifted.modulus);
        }
        assert_eq!(prod, norm(&fb, &lifted.modulus));
        // one lifted factor times lc, symmetric, primitive, must be a true factor
        let mut found = 0;
        for u in &lifted.factors {
            let cand = symmetric(&scale(u, &BigInt::from(3), &lifted.modulus), &lifted.modulus);
            let cand = IntPoly::new(cand).primitive_part();
            if f.div_exact(&cand).is_some() {
                found += 1;
            }
        }
        assert_eq!(found, 2);
    }

    #[test]
    fn lift_many_factors() {
        // (X-1)(X-2)(X-3)(X-4) = X^4 - 10X^3 + 35X^2 - 50X + 24, mod 7
        let f = IntPoly::from_i64(&[24, -50, 35, -10, 1]);
        let fp = ZpPoly::new(7, f.coeffs_mod(7));
        assert!(fp.is_squarefree());
        let factors = crate::factor::zp::factor_monic_squarefree(&fp);
        assert_eq!(factors.len(), 4);
        let lifted = lift_factorization(&f.coeffs().to_vec(), &factors, 7, &BigInt::from(200));
        for u in &lifted.factors {
            let cand = IntPoly::new(symmetric(u, &lifted.modulus));
            assert!(f.div_exact(&cand).is_some(), "lifted {cand} should divide");
        }
    }
}
