//! Exact factorization and reducibility decisions over the integers.
//!
//! Pipeline: content/primitive extraction and X^k factors, a mod-p
//! squarefree/degree-set filter, a rational-root scan when the endpoint
//! coefficients are small enough to enumerate divisors, then Hensel lifting
//! and subset recombination (classical Zassenhaus).
//!
//! "Reducible" means the primitive part splits into two integer factors of
//! positive degree; content alone never counts.

mod hensel;
mod zp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::poly::IntPoly;
use crate::serde_util::big_str;

use hensel::{lift_factorization, symmetric};
use zp::ZpPoly;

/// One irreducible factor with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorPower {
    #[serde(rename = "coeffs")]
    pub poly: IntPoly,
    pub mult: u32,
}

/// Complete factorization: sign · content · prod(factor^mult).
///
/// Factors are primitive, irreducible over Q, have positive leading
/// coefficients, and are sorted by (degree, coefficient sequence) so the
/// representation is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub sign: i8,
    #[serde(with = "big_str")]
    pub content: BigInt,
    pub factors: Vec<FactorPower>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn expand(&self) -> IntPoly {
        let mut acc = IntPoly::constant(BigInt::from(self.sign) * &self.content);
        for fp in &self.factors {
            for _ in 0..fp.mult {
                acc = &acc * &fp.poly;
            }
        }
        acc
    }

    /// Total degree of the factored polynomial.
    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .map(|fp| fp.poly.degree().unwrap_or(0) * fp.mult as usize)
            .sum()
    }

    /// True iff the primitive part has at least two positive-degree factors
    /// counted with multiplicity.
    pub fn primitive_is_reducible(&self) -> bool {
        let count: u32 = self.factors.iter().map(|fp| fp.mult).sum();
        count >= 2
    }

    /// All ordered pairs (p, q) with p·q equal to the factored polynomial and
    /// deg p = s.
    ///
    /// Deterministic order: exponent assignments to p walk the factor list
    /// with earlier factors preferring higher exponents; within an
    /// assignment, the content divisor given to p ascends; the whole list of
    /// positive-leading-p pairs is then followed by its negation (-p, -q).
    pub fn splits(&self, s: usize) -> Vec<(IntPoly, IntPoly)> {
        let mut positives = Vec::new();
        let exps: Vec<u32> = self.factors.iter().map(|fp| fp.mult).collect();
        let degs: Vec<usize> = self
            .factors
            .iter()
            .map(|fp| fp.poly.degree().unwrap_or(0))
            .collect();
        let content_divs = divisors_big(&self.content);
        let sign = BigInt::from(self.sign);

        let mut alpha = vec![0u32; exps.len()];
        enumerate_exponents(&exps, &degs, s, 0, 0, &mut alpha, &mut |alpha| {
            let mut a = IntPoly::one();
            let mut b = IntPoly::one();
            for (i, fp) in self.factors.iter().enumerate() {
                for _ in 0..alpha[i] {
                    a = &a * &fp.poly;
                }
                for _ in 0..(fp.mult - alpha[i]) {
                    b = &b * &fp.poly;
                }
            }
            for cp in &content_divs {
                let cq = &self.content / cp;
                let p = a.scale(cp);
                let q = b.scale(&(&sign * cq));
                positives.push((p, q));
            }
        });

        let negatives: Vec<_> = positives.iter().map(|(p, q)| (-p, -q)).collect();
        positives.extend(negatives);
        positives
    }
}

/// Walks exponent vectors alpha with 0 <= alpha_i <= exps_i and
/// sum(alpha_i·degs_i) = target, earlier coordinates descending first.
fn enumerate_exponents(
    exps: &[u32],
    degs: &[usize],
    target: usize,
    i: usize,
    acc: usize,
    alpha: &mut [u32],
    emit: &mut impl FnMut(&[u32]),
) {
    if i == exps.len() {
        if acc == target {
            emit(alpha);
        }
        return;
    }
    for a in (0..=exps[i]).rev() {
        let next = acc + a as usize * degs[i];
        if next > target {
            continue;
        }
        alpha[i] = a;
        enumerate_exponents(exps, degs, target, i + 1, next, alpha, emit);
    }
    alpha[i] = 0;
}

/// Positive divisors of |v|, ascending. Trial division; contents at desk
/// scale are tiny.
fn divisors_big(v: &BigInt) -> Vec<BigInt> {
    let v = v.abs();
    if let Ok(small) = u64::try_from(&v) {
        return divisors_u64(small).into_iter().map(BigInt::from).collect();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= v {
        if (&v % &d).is_zero() {
            small.push(d.clone());
            let q = &v / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn divisors_u64(v: u64) -> Vec<u64> {
    debug_assert!(v > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            small.push(d);
            if v / d != d {
                large.push(v / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn next_prime(after: u64) -> u64 {
    let mut n = after + 1;
    while !is_prime_u64(n) {
        n += 1;
    }
    n
}

/// Modular data for one usable prime.
struct PrimeData {
    p: u64,
    monic_image: ZpPoly,
    /// (irreducible factor degree, count) pairs from distinct-degree analysis.
    degree_multiset: Vec<(usize, usize)>,
}

/// First `count` primes p with p not dividing lc(h) and a squarefree image.
/// `h` must be squarefree over Z so the scan terminates (bad primes divide
/// the discriminant).
fn good_primes(h: &IntPoly, count: usize) -> Vec<PrimeData> {
    let lc = h.leading_coeff().expect("nonzero").clone();
    let mut out = Vec::with_capacity(count);
    let mut p = 1u64;
    let mut scanned = 0u32;
    while out.len() < count {
        p = next_prime(p);
        scanned += 1;
        assert!(scanned < 100_000, "prime scan must terminate for squarefree input");
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let image = ZpPoly::new(p, h.coeffs_mod(p));
        if !image.is_squarefree() {
            continue;
        }
        let monic = image.make_monic();
        let degree_multiset = zp::ddf_degree_multiset(&monic);
        out.push(PrimeData {
            p,
            monic_image: monic,
            degree_multiset,
        });
    }
    out
}

/// Squarefree test over Z: a single prime with p ∤ lc and gcd(f̄, f̄') = 1
/// certifies squarefreeness; after 25 inconclusive primes fall back to the
/// exact primitive-PRS gcd (returned so callers can split off the square
/// part without recomputing).
fn squarefree_status(h: &IntPoly) -> (bool, Option<IntPoly>) {
    let lc = h.leading_coeff().expect("nonzero");
    let mut p = 1u64;
    for _ in 0..25 {
        p = next_prime(p);
        if (lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let image = ZpPoly::new(p, h.coeffs_mod(p));
        let deriv = image.derivative();
        if deriv.is_zero() {
            continue;
        }
        if image.gcd(&deriv).is_one() {
            return (true, None);
        }
    }
    let g = gcd_primitive(h, &h.derivative());
    if g.degree().unwrap_or(0) >= 1 {
        (false, Some(g))
    } else {
        (true, None)
    }
}

/// Pseudo-remainder: repeatedly scale by lc(b) and cancel the top term.
/// Only the primitive part matters to the PRS, so the extra lc powers are
/// harmless.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.degree().expect("nonzero divisor");
    let lcb = b.leading_coeff().unwrap().clone();
    let mut r = a.clone();
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let lcr = r.leading_coeff().unwrap().clone();
        r = &r.scale(&lcb) - &b.shift_up(dr - db).scale(&lcr);
    }
    r
}

/// Primitive gcd over Z (positive leading coefficient), by primitive PRS.
fn gcd_primitive(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let normalize = |f: &IntPoly| -> IntPoly {
        let prim = f.primitive_part();
        if prim.leading_coeff().is_some_and(|c| c.is_negative()) {
            -&prim
        } else {
            prim
        }
    };
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    let (mut x, mut y) = (normalize(a), normalize(b));
    if x.degree() < y.degree() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_zero() {
        let r = pseudo_rem(&x, &y);
        x = y;
        y = if r.is_zero() { r } else { normalize(&r) };
    }
    x
}

const ROOT_SCAN_ENDPOINT_LIMIT: u64 = 100_000_000;

/// Rational-root scan for a squarefree primitive h with h(0) != 0: candidate
/// roots r/s have r | h(0), s | lc(h). Runs only when both endpoints are
/// small enough to enumerate divisors; extracts the linear factors it finds.
/// Returns true when the scan ran (so no linear factor remains in `h`).
fn extract_linear_by_roots(h: &mut IntPoly, out: &mut Vec<IntPoly>) -> bool {
    let a0 = h.constant_coeff().abs();
    let lc = h.leading_coeff().unwrap().abs();
    let (Ok(a0s), Ok(lcs)) = (u64::try_from(&a0), u64::try_from(&lc)) else {
        return false;
    };
    if a0s > ROOT_SCAN_ENDPOINT_LIMIT || lcs > ROOT_SCAN_ENDPOINT_LIMIT {
        return false;
    }
    let rs = divisors_u64(a0s);
    let ss = divisors_u64(lcs);
    for &r in &rs {
        for &s in &ss {
            if r.gcd(&s) != 1 {
                continue;
            }
            for sign in [1i64, -1] {
                if h.degree().unwrap_or(0) < 2 {
                    return true;
                }
                let num = BigInt::from(sign * r as i64);
                let den = BigInt::from(s);
                if !evals_to_zero_at_rational(h, &num, &den) {
                    continue;
                }
                // primitive linear factor sX - r
                let lin = IntPoly::new(vec![-&num, den.clone()]);
                if let Some(q) = h.div_exact(&lin) {
                    out.push(lin);
                    *h = q;
                }
            }
        }
    }
    true
}

/// Exact test of f(num/den) = 0 via sum a_i·num^i·den^(n-i).
fn evals_to_zero_at_rational(f: &IntPoly, num: &BigInt, den: &BigInt) -> bool {
    let coeffs = f.coeffs();
    let mut acc = BigInt::zero();
    let mut den_pow = BigInt::one();
    for c in coeffs.iter().rev() {
        acc = acc * num + c * &den_pow;
        den_pow *= den;
    }
    acc.is_zero()
}

/// Bitset of factor degrees achievable as subset sums of a modular degree
/// multiset, restricted to proper degrees 1..n-1.
fn proper_degree_mask(multiset: &[(usize, usize)], n: usize) -> u128 {
    assert!(n < 128, "degree {n} beyond supported range");
    let mut bits: u128 = 1;
    for &(d, cnt) in multiset {
        for _ in 0..cnt {
            bits |= bits << d;
        }
    }
    let full: u128 = if n + 1 >= 128 { !0 } else { (1u128 << (n + 1)) - 1 };
    bits & full & !1 & !(1u128 << n)
}

fn ceil_sqrt_usize(v: usize) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r < v as u64 {
        r += 1;
    }
    r
}

/// Landau–Mignotte-type coefficient bound, following von zur Gathen &
/// Gerhard, "Modern Computer Algebra", Alg. 15.22: for any factor g of h,
/// the integer polynomial lc(h)·g/lc(g) has max-norm at most
/// sqrt(n+1)·2^n·height(h)·|lc(h)|.
fn factor_coeff_bound(h: &IntPoly) -> BigInt {
    let n = h.degree().unwrap();
    BigInt::from(ceil_sqrt_usize(n + 1)) * (BigInt::one() << n) * h.height()
        * h.leading_coeff().unwrap().abs()
}

/// Lexicographic k-subsets of 0..n.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    fresh: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            fresh: true,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        let k = self.idx.len();
        if k > self.n {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(&self.idx);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] != i + self.n - k {
                break;
            }
        }
        self.idx[i] += 1;
        for j in i + 1..k {
            self.idx[j] = self.idx[j - 1] + 1;
        }
        Some(&self.idx)
    }
}

/// Zassenhaus recombination over the lifted factors. `h` is squarefree,
/// primitive, positive lc, h(0) != 0. Returns irreducible factors; with
/// `stop_early` it returns as soon as two factors are certain.
fn recombine(
    mut h: IntPoly,
    mut units: Vec<Vec<BigInt>>,
    modulus: &BigInt,
    deg_mask: u128,
    stop_early: bool,
) -> Vec<IntPoly> {
    let mut found = Vec::new();
    let mut size = 1usize;
    'sizes: while 2 * size <= units.len() {
        let mut combos = Combinations::new(units.len(), size);
        while let Some(subset) = combos.next() {
            let deg_sum: usize = subset.iter().map(|&i| units[i].len() - 1).sum();
            if deg_mask & (1u128 << deg_sum) == 0 {
                continue;
            }
            let b = h.leading_coeff().unwrap().clone();
            // trailing-coefficient prefilter: a true candidate's constant
            // term divides lc(h)·h(0)
            let mut t0 = b.clone();
            for &i in subset {
                t0 = (&t0 * &units[i][0]).mod_floor(modulus);
            }
            let half = modulus / 2;
            if t0 > half {
                t0 -= modulus;
            }
            if t0.is_zero() {
                continue;
            }
            if !((&b * h.constant_coeff()) % &t0).is_zero() {
                continue;
            }
            let mut cand = vec![b.clone()];
            for &i in subset {
                cand = hensel::mul(&cand, &units[i], modulus);
            }
            let cand = IntPoly::new(symmetric(&cand, modulus));
            if cand.is_zero() {
                continue;
            }
            let mut g = cand.primitive_part();
            if g.leading_coeff().is_some_and(|c| c.is_negative()) {
                g = -&g;
            }
            if let Some(q) = h.div_exact(&g) {
                found.push(g);
                h = q;
                let mut remove: Vec<usize> = subset.to_vec();
                remove.sort_unstable_by(|a, b| b.cmp(a));
                for i in remove {
                    units.remove(i);
                }
                if stop_early {
                    found.push(h);
                    return found;
                }
                continue 'sizes;
            }
        }
        size += 1;
    }
    if h.degree().unwrap_or(0) >= 1 {
        found.push(h);
    }
    found
}

/// Factors a squarefree primitive polynomial (positive lc, h(0) != 0,
/// degree >= 1) into irreducibles. With `stop_early`, returns once at least
/// two factors are known; only `len() > 1` is meaningful then.
fn factor_squarefree(mut h: IntPoly, stop_early: bool) -> Vec<IntPoly> {
    let mut out = Vec::new();
    if h.degree() == Some(1) {
        out.push(h);
        return out;
    }

    let mut primes = good_primes(&h, 3);
    let n = h.degree().unwrap();
    let mut mask = !0u128;
    for pd in &primes {
        mask &= proper_degree_mask(&pd.degree_multiset, n);
    }
    if mask == 0 {
        out.push(h);
        return out;
    }

    // linear factors are possible only when degree 1 survives the filter
    if mask & 2 != 0 && extract_linear_by_roots(&mut h, &mut out) {
        if !out.is_empty() {
            match h.degree().unwrap_or(0) {
                0 => return out,
                _ if stop_early => {
                    out.push(h);
                    return out;
                }
                1 => {
                    out.push(h);
                    return out;
                }
                _ => {}
            }
            // h shrank: refresh the modular picture
            primes = good_primes(&h, 3);
            let n = h.degree().unwrap();
            mask = !0u128;
            for pd in &primes {
                mask &= proper_degree_mask(&pd.degree_multiset, n);
            }
            if mask == 0 {
                out.push(h);
                return out;
            }
        } else {
            // scan ran and found nothing: degree 1 is impossible after all
            mask &= !2u128;
            if mask == 0 {
                out.push(h);
                return out;
            }
        }
    }

    let best = primes
        .iter()
        .min_by_key(|pd| {
            let count: usize = pd.degree_multiset.iter().map(|&(_, c)| c).sum();
            (count, pd.p)
        })
        .expect("at least one good prime");
    let units = zp::factor_monic_squarefree(&best.monic_image);
    if units.len() == 1 {
        out.push(h);
        return out;
    }
    let span = BigInt::from(2) * factor_coeff_bound(&h);
    let lifted = lift_factorization(h.coeffs(), &units, best.p, &span);
    out.extend(recombine(h, lifted.factors, &lifted.modulus, mask, stop_early));
    out
}

/// Complete factorization into rationally-irreducible primitive factors.
///
/// The output is canonical: factors sorted by (degree, coefficient
/// sequence), positive leading coefficients, positive content, and
/// sign·content·prod(factor^mult) multiplies back to the input exactly.
pub fn factor(f: &IntPoly) -> Result<Factorization, Error> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (content, prim) = f.content_primitive()?;
    let negative = prim.leading_coeff().is_some_and(|c| c.is_negative());
    let sign: i8 = if negative { -1 } else { 1 };
    let mut g = if negative { -&prim } else { prim };

    let mut factors: Vec<(IntPoly, u32)> = Vec::new();
    if g.degree().unwrap_or(0) >= 1 {
        let k = g.trailing_zeros().unwrap_or(0);
        if k > 0 {
            factors.push((IntPoly::x(), k as u32));
            g = g.shift_down(k);
        }
    }
    if g.degree().unwrap_or(0) >= 1 {
        let (squarefree, gcd) = squarefree_status(&g);
        let irreducibles = if squarefree {
            factor_squarefree(g.clone(), false)
        } else {
            let gg = gcd.expect("status carries the gcd");
            let sqf = g.div_exact(&gg).expect("gcd divides (Gauss)");
            factor_squarefree(sqf, false)
        };
        for u in irreducibles {
            let mut mult = 0u32;
            let mut cur = g.clone();
            while let Some(q) = cur.div_exact(&u) {
                mult += 1;
                cur = q;
            }
            debug_assert!(mult >= 1);
            factors.push((u, mult));
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));

    let result = Factorization {
        sign,
        content,
        factors: factors
            .into_iter()
            .map(|(poly, mult)| FactorPower { poly, mult })
            .collect(),
    };
    debug_assert_eq!(result.expand(), *f, "factorization must multiply back");
    Ok(result)
}

/// True iff f = p·q with integer polynomials of positive degree;
/// equivalently the primitive part is reducible over Q. Constants and the
/// zero polynomial are rejected.
pub fn is_reducible(f: &IntPoly) -> Result<bool, Error> {
    let deg = match f.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::DegreeTooSmall),
        Some(d) => d,
    };
    if deg == 1 {
        return Ok(false);
    }
    let prim = f.primitive_part();
    let h = if prim.leading_coeff().is_some_and(|c| c.is_negative()) {
        -&prim
    } else {
        prim
    };
    if h.constant_coeff().is_zero() {
        return Ok(true); // X divides, degree >= 2
    }
    let one = BigInt::one();
    if h.eval_at(&one).is_zero() || h.eval_at(&-&one).is_zero() {
        return Ok(true);
    }
    let (squarefree, _) = squarefree_status(&h);
    if !squarefree {
        return Ok(true); // repeated factor of positive degree
    }
    Ok(factor_squarefree(h, true).len() > 1)
}

/// All ordered pairs (p, q) of integer polynomials with f = p·q,
/// deg p = s, deg q = deg f − s, in the documented deterministic order.
pub fn factor_splits(f: &IntPoly, s: usize) -> Result<Vec<(IntPoly, IntPoly)>, Error> {
    let degree = match f.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(d) => d,
    };
    if s < 1 || degree < 2 || s > degree - 1 {
        return Err(Error::SplitDegreeOutOfRange {
            s,
            degree,
            max: degree.saturating_sub(1),
        });
    }
    let fact = factor(f)?;
    Ok(fact.splits(s))
}

/// First prime (among the first `max_primes` candidates) whose image has full
/// degree and is irreducible mod p — a positive certificate of
/// irreducibility over Q for primitive f.
pub fn modp_irreducibility_certificate(f: &IntPoly, max_primes: usize) -> Option<u64> {
    let n = f.degree()?;
    if n == 0 {
        return None;
    }
    let lc = f.leading_coeff().unwrap();
    let mut p = 1u64;
    for _ in 0..max_primes {
        p = next_prime(p);
        if (lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let image = ZpPoly::new(p, f.coeffs_mod(p));
        if image.deg() != Some(n) || !image.is_squarefree() {
            continue;
        }
        let ms = zp::ddf_degree_multiset(&image.make_monic());
        if ms == [(n, 1)] {
            return Some(p);
        }
    }
    None
}
