//! The explicit reducibility bound 4(n-1)·M^(n-2)·(sum of divisor counts)^2,
//! modulus search, divisor statistics, and brute-force verifiers for the two
//! pillars behind it: injectivity of coefficientwise reduction mod M, and the
//! per-key bound |V| <= M^(n-2) on factorizations with prescribed endpoint
//! data.
//!
//! A related count of factor pairs by Kuba bounds |R_n(h)| by C_n·h^n with an
//! unspecified constant C_n; it is better for n small relative to log h, but
//! with no explicit constant there is nothing to evaluate here.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::census::{star_box_iter, CensusOptions, CoeffSet};
use crate::error::Error;
use crate::factor::factor;
use crate::poly::IntPoly;
use crate::serde_util::{big_str, big_str_opt};

/// Euler–Mascheroni constant, for the sharpened divisor-summatory reference
/// x·ln x + (2γ-1)·x.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Smallest M >= |S| with pairwise-distinct residues of S mod M. Always at
/// most max(S) - min(S) + 1, which is itself always valid.
pub fn minimal_modulus(set: &CoeffSet) -> u64 {
    let el = set.elements();
    if el.len() < 2 {
        return 1;
    }
    let mut m = el.len() as u64;
    loop {
        if distinct_residues(el, m).is_none() {
            return m;
        }
        m += 1;
    }
}

/// Returns a colliding pair if two elements share a residue mod m.
fn distinct_residues(elements: &[i64], m: u64) -> Option<(i64, i64)> {
    let mut seen: HashMap<u64, i64> = HashMap::with_capacity(elements.len());
    for &v in elements {
        let r = (v as i128).rem_euclid(m as i128) as u64;
        if let Some(&prev) = seen.get(&r) {
            return Some((prev, v));
        }
        seen.insert(r, v);
    }
    None
}

/// Number of positive divisors of |m|; zero is rejected.
pub fn divisor_count(m: i64) -> Result<u64, Error> {
    if m == 0 {
        return Err(Error::DivisorOfZero);
    }
    let v = m.unsigned_abs();
    let mut count = 0u64;
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            count += if d * d == v { 1 } else { 2 };
        }
        d += 1;
    }
    Ok(count)
}

/// Sum of d(|a|) over a in S*.
pub fn divisor_sum_over_star(set: &CoeffSet) -> u64 {
    set.nonzero()
        .iter()
        .map(|&a| divisor_count(a).expect("nonzero"))
        .sum()
}

/// Evaluation of the main bound for one (n, S).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub set: String,
    pub m: u64,
    pub divisor_sum: u64,
    #[serde(with = "big_str")]
    pub bound: BigInt,
    #[serde(default, with = "big_str_opt")]
    pub census: Option<BigInt>,
    pub ratio: Option<f64>,
}

impl BoundReport {
    /// Joins an exact census count, recording the census/bound ratio.
    pub fn attach_census(&mut self, census: u128) {
        let c = BigInt::from(census);
        self.ratio = Some(ratio_f64(&c, &self.bound));
        self.census = Some(c);
    }
}

fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    let n = num.to_f64().unwrap_or(f64::INFINITY);
    let d = den.to_f64().unwrap_or(f64::INFINITY);
    if d == 0.0 {
        f64::INFINITY
    } else {
        n / d
    }
}

/// 4(n-1)·M^(n-2)·(sum_{a in S*} d(|a|))^2 in exact integer arithmetic.
/// With no modulus supplied, the minimal valid one is used; a supplied
/// modulus is validated and a colliding pair reported on failure.
pub fn theorem_bound(n: usize, set: &CoeffSet, m: Option<u64>) -> Result<BoundReport, Error> {
    if n < 2 {
        return Err(Error::InvalidSet(format!(
            "bound requires degree n >= 2, got {n}"
        )));
    }
    if set.nonzero().is_empty() {
        return Err(Error::InvalidSet("S* is empty".into()));
    }
    let m = match m {
        Some(m) => {
            if m == 0 {
                return Err(Error::InvalidSet("modulus must be positive".into()));
            }
            if let Some((a, b)) = distinct_residues(set.elements(), m) {
                return Err(Error::InvalidModulus { m, a, b });
            }
            m
        }
        None => minimal_modulus(set),
    };
    let divisor_sum = divisor_sum_over_star(set);
    let bound = BigInt::from(4) * BigInt::from(n as u64 - 1) * BigInt::from(m).pow(n as u32 - 2)
        * BigInt::from(divisor_sum)
        * BigInt::from(divisor_sum);
    Ok(BoundReport {
        n,
        set: set.describe(),
        m,
        divisor_sum,
        bound,
        census: None,
        ratio: None,
    })
}

/// D(x) = sum_{k <= x} d(k), exactly, via the hyperbola identity
/// D(x) = 2·sum_{d <= sqrt(x)} floor(x/d) - floor(sqrt(x))^2.
pub fn divisor_summatory(x: u64) -> BigInt {
    if x == 0 {
        return BigInt::zero();
    }
    let r = isqrt_u64(x);
    let mut acc: u128 = 0;
    for d in 1..=r {
        acc += (x / d) as u128;
    }
    BigInt::from(2u8) * BigInt::from(acc) - BigInt::from(r as u128 * r as u128)
}

fn isqrt_u64(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r > 0 && r * r > x {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= x) {
        r += 1;
    }
    r
}

/// Coefficientwise reduction into Z/m, trailing zeros trimmed (so the value
/// is a genuine element of (Z/m)[X]).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResiduePoly {
    pub modulus: u64,
    pub coeffs: Vec<u64>,
}

/// Reduces f coefficientwise mod m (m >= 2).
///
/// Restricted to polynomials of one fixed degree with coefficients in a set
/// S whose residues mod m are pairwise distinct, the map is injective; with
/// mixed degrees it stays injective as long as no nonzero element of S is
/// divisible by m (otherwise a leading coefficient can vanish and collide
/// with a lower-degree polynomial).
pub fn residue_map(f: &IntPoly, m: u64) -> ResiduePoly {
    assert!(m >= 2, "residue map needs modulus >= 2");
    let bm = BigInt::from(m);
    let mut coeffs: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|c| {
            let r = c.mod_floor(&bm);
            u64::try_from(&r).expect("reduced below m")
        })
        .collect();
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    ResiduePoly { modulus: m, coeffs }
}

/// Factor-endpoint data: f = p·q with deg p = s, deg q = t, p(0) = b0,
/// q(0) = c0, lc(p) = bs, lc(q) = ct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VKey {
    pub s: usize,
    pub t: usize,
    pub b0: i64,
    pub bs: i64,
    pub c0: i64,
    pub ct: i64,
}

impl VKey {
    /// The endpoint products a_0 = b0·c0 and a_n = bs·ct must land in S*
    /// for the key's V-set to be inhabitable.
    pub fn endpoints_in_star(&self, set: &CoeffSet) -> bool {
        let a0 = self.b0 as i128 * self.c0 as i128;
        let an = self.bs as i128 * self.ct as i128;
        let ok = |v: i128| i64::try_from(v).is_ok_and(|v| v != 0 && set.contains(v));
        ok(a0) && ok(an)
    }
}

/// The exact V-set for one key, with a marker for keys that are empty by
/// definition (endpoint products outside S*).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VSet {
    pub key: VKey,
    pub satisfiable: bool,
    pub members: Vec<IntPoly>,
}

/// Brute-force V(s,t,b0,bs,c0,ct): enumerate the star box, factor, and keep
/// the polynomials admitting a split with the prescribed endpoint data.
pub fn enumerate_v(
    n: usize,
    set: &CoeffSet,
    key: VKey,
    opts: CensusOptions,
) -> Result<VSet, Error> {
    if n < 2 {
        return Err(Error::InvalidKey(format!("degree n must be >= 2, got {n}")));
    }
    if key.s == 0 || key.t == 0 || key.s + key.t != n {
        return Err(Error::InvalidKey(format!(
            "need s, t >= 1 with s + t = n; got s = {}, t = {}, n = {n}",
            key.s, key.t
        )));
    }
    check_box_budget(n, set, opts.budget)?;
    if !key.endpoints_in_star(set) {
        return Ok(VSet {
            key,
            satisfiable: false,
            members: Vec::new(),
        });
    }
    let b0 = BigInt::from(key.b0);
    let bs = BigInt::from(key.bs);
    let c0 = BigInt::from(key.c0);
    let ct = BigInt::from(key.ct);
    let a0 = &b0 * &c0;
    let an = &bs * &ct;

    let mut members = Vec::new();
    for coeffs in star_box_iter(n, set) {
        let f = IntPoly::from_i64(&coeffs);
        if f.constant_coeff() != a0 || *f.leading_coeff().unwrap() != an {
            continue;
        }
        let fact = factor(&f).expect("nonzero");
        if !fact.primitive_is_reducible() {
            continue; // no proper-degree splits exist
        }
        let hit = fact.splits(key.s).into_iter().any(|(p, q)| {
            p.constant_coeff() == b0
                && *p.leading_coeff().unwrap() == bs
                && q.constant_coeff() == c0
                && *q.leading_coeff().unwrap() == ct
        });
        if hit {
            members.push(f);
        }
    }
    Ok(VSet {
        key,
        satisfiable: true,
        members,
    })
}

fn check_box_budget(n: usize, set: &CoeffSet, budget: u64) -> Result<(), Error> {
    let star = set.nonzero().len() as u128;
    let full = set.len() as u128;
    let mut size = star * star;
    for _ in 1..n {
        size = size.saturating_mul(full);
    }
    if size > budget as u128 {
        return Err(Error::BudgetExceeded {
            size: BigInt::from(size),
            budget,
        });
    }
    Ok(())
}

/// One key's row in the V-bound report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VRow {
    pub s: usize,
    pub t: usize,
    pub b0: i64,
    pub bs: i64,
    pub c0: i64,
    pub ct: i64,
    pub v: u64,
}

/// Outcome of sweeping every valid key at one (n, S).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VBoundReport {
    pub n: usize,
    pub set: String,
    pub m: u64,
    /// M^(n-2), the proof's cap on each |V|.
    #[serde(with = "big_str")]
    pub per_key_bound: BigInt,
    pub rows: Vec<VRow>,
    pub max_v: u64,
    #[serde(with = "big_str")]
    pub sum_v: BigInt,
    #[serde(with = "big_str")]
    pub census: BigInt,
    pub all_keys_within_bound: bool,
    /// sum over keys of |V| covers the census of reducible polynomials.
    pub covering_holds: bool,
}

/// Sweeps all valid keys (a_0, a_n in S*; b0, bs over all signed divisors;
/// s + t = n), tallying |V| per key in one pass over the star box, and
/// checks both proof inequalities: |V| <= M^(n-2) per key, and
/// sum |V| >= |R_n^*(S)|.
pub fn check_v_bound(n: usize, set: &CoeffSet, opts: CensusOptions) -> Result<VBoundReport, Error> {
    if n < 2 {
        return Err(Error::InvalidSet(format!(
            "V-bound sweep requires n >= 2, got {n}"
        )));
    }
    if set.nonzero().is_empty() {
        return Err(Error::InvalidSet("S* is empty".into()));
    }
    check_box_budget(n, set, opts.budget)?;

    // all valid keys, deterministically ordered
    let mut keys: Vec<VKey> = Vec::new();
    for &a0 in set.nonzero() {
        for b0 in signed_divisors(a0) {
            let c0 = a0 / b0;
            for &an in set.nonzero() {
                for bs in signed_divisors(an) {
                    let ct = an / bs;
                    for s in 1..n {
                        keys.push(VKey {
                            s,
                            t: n - s,
                            b0,
                            bs,
                            c0,
                            ct,
                        });
                    }
                }
            }
        }
    }
    keys.sort_unstable();
    keys.dedup();

    let mut tally: HashMap<VKey, (u64, usize)> = HashMap::new();
    let mut census: u64 = 0;
    for (fi, coeffs) in star_box_iter(n, set).enumerate() {
        let f = IntPoly::from_i64(&coeffs);
        let fact = factor(&f).expect("nonzero");
        if !fact.primitive_is_reducible() {
            continue;
        }
        census += 1;
        for s in 1..n {
            for (p, q) in fact.splits(s) {
                let key = VKey {
                    s,
                    t: n - s,
                    b0: endpoint(&p.constant_coeff()),
                    bs: endpoint(p.leading_coeff().unwrap()),
                    c0: endpoint(&q.constant_coeff()),
                    ct: endpoint(q.leading_coeff().unwrap()),
                };
                let entry = tally.entry(key).or_insert((0, usize::MAX));
                if entry.1 != fi {
                    entry.0 += 1;
                    entry.1 = fi;
                }
            }
        }
    }

    let m = minimal_modulus(set);
    let per_key_bound = BigInt::from(m).pow(n as u32 - 2);
    let mut rows = Vec::with_capacity(keys.len());
    let mut max_v = 0u64;
    let mut sum_v = BigInt::zero();
    let mut all_within = true;
    for key in &keys {
        let v = tally.get(key).map(|&(c, _)| c).unwrap_or(0);
        max_v = max_v.max(v);
        sum_v += v;
        if BigInt::from(v) > per_key_bound {
            all_within = false;
        }
        rows.push(VRow {
            s: key.s,
            t: key.t,
            b0: key.b0,
            bs: key.bs,
            c0: key.c0,
            ct: key.ct,
            v,
        });
    }
    // every split of every reducible polynomial lands on a valid key
    debug_assert_eq!(
        tally.keys().filter(|k| !keys.contains(k)).count(),
        0,
        "observed keys must be in the valid key list"
    );
    let census_big = BigInt::from(census);
    Ok(VBoundReport {
        n,
        set: set.describe(),
        m,
        per_key_bound,
        max_v,
        covering_holds: sum_v >= census_big,
        sum_v,
        census: census_big,
        all_keys_within_bound: all_within,
        rows,
    })
}

fn endpoint(v: &BigInt) -> i64 {
    i64::try_from(v).expect("factor endpoints divide set elements")
}

/// Signed divisors of a nonzero i64: ±d for every positive divisor d of |a|,
/// ascending in |d| with the positive one first.
fn signed_divisors(a: i64) -> Vec<i64> {
    let v = a.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(d);
            if v / d != d {
                out.push(v / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out.into_iter()
        .flat_map(|d| [d as i64, -(d as i64)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn minimal_modulus_examples() {
        assert_eq!(minimal_modulus(&CoeffSet::pm1()), 3);
        assert_eq!(minimal_modulus(&CoeffSet::new([0, 1]).unwrap()), 2);
        assert_eq!(minimal_modulus(&CoeffSet::odd_window(2).unwrap()), 5);
        assert_eq!(minimal_modulus(&CoeffSet::new([5]).unwrap()), 1);
    }

    #[test]
    fn minimal_modulus_within_remark_bound() {
        for set in [
            CoeffSet::pm1(),
            CoeffSet::zero_pm1(),
            CoeffSet::odd_window(3).unwrap(),
            CoeffSet::new([2, 5, 9]).unwrap(),
        ] {
            let m = minimal_modulus(&set);
            let span = (set.elements().last().unwrap() - set.elements().first().unwrap()) as u64;
            assert!(m <= span + 1);
            // every smaller candidate >= |S| has a collision witness
            for cand in set.len() as u64..m {
                assert!(distinct_residues(set.elements(), cand).is_some());
            }
        }
    }

    #[test]
    fn divisor_count_examples() {
        assert_eq!(divisor_count(1).unwrap(), 1);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(divisor_count(-4).unwrap(), 3);
        assert!(divisor_count(0).is_err());
    }

    #[test]
    fn theorem_bound_examples() {
        let r = theorem_bound(3, &CoeffSet::pm1(), None).unwrap();
        assert_eq!((r.m, r.divisor_sum), (3, 2));
        assert_eq!(r.bound, BigInt::from(96));

        let r = theorem_bound(2, &CoeffSet::pm1(), None).unwrap();
        assert_eq!(r.bound, BigInt::from(16));

        // S* of {0,±1} equals {±1}
        let r = theorem_bound(3, &CoeffSet::zero_pm1(), None).unwrap();
        assert_eq!(r.bound, BigInt::from(96));
    }

    #[test]
    fn theorem_bound_rejects_colliding_modulus() {
        let err = theorem_bound(3, &CoeffSet::pm1(), Some(2)).unwrap_err();
        match err {
            Error::InvalidModulus { m, a, b } => {
                assert_eq!(m, 2);
                assert_eq!((a.min(b), a.max(b)), (-1, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn theorem_bound_monotone_in_valid_modulus() {
        let set = CoeffSet::pm1();
        for n in 3..=8 {
            let lo = theorem_bound(n, &set, Some(3)).unwrap().bound;
            let hi = theorem_bound(n, &set, Some(5)).unwrap().bound;
            assert!(lo < hi);
        }
    }

    #[test]
    fn divisor_summatory_anchors() {
        assert_eq!(divisor_summatory(1), BigInt::one());
        assert_eq!(divisor_summatory(10), BigInt::from(27));
        assert_eq!(divisor_summatory(100), BigInt::from(482));
    }

    #[test]
    fn divisor_summatory_matches_direct_sum() {
        let mut direct = BigInt::zero();
        for x in 1..=2000u64 {
            direct += BigInt::from(divisor_count(x as i64).unwrap());
            assert_eq!(divisor_summatory(x), direct, "x = {x}");
        }
    }

    #[test]
    fn residue_map_examples() {
        let f = IntPoly::from_i64(&[-1, 1]);
        assert_eq!(residue_map(&f, 3).coeffs, vec![2, 1]);
        let f = IntPoly::from_i64(&[1, 1, 1]);
        assert_eq!(residue_map(&f, 3).coeffs, vec![1, 1, 1]);
        // 3X + 4 mod 3 = 1: the leading coefficient vanishes
        let f = IntPoly::from_i64(&[4, 3]);
        assert_eq!(residue_map(&f, 3).coeffs, vec![1]);
    }

    #[test]
    fn enumerate_v_malformed_key_is_empty() {
        let key = VKey {
            s: 2,
            t: 2,
            b0: 2,
            bs: 1,
            c0: 1,
            ct: 1,
        };
        let v = enumerate_v(4, &CoeffSet::pm1(), key, CensusOptions::default()).unwrap();
        assert!(!v.satisfiable);
        assert!(v.members.is_empty());
    }

    #[test]
    fn enumerate_v_rejects_bad_shape() {
        let key = VKey {
            s: 0,
            t: 4,
            b0: 1,
            bs: 1,
            c0: 1,
            ct: 1,
        };
        assert!(enumerate_v(4, &CoeffSet::pm1(), key, CensusOptions::default()).is_err());
    }

    #[test]
    fn enumerate_v_n2_pm1_empty() {
        let key = VKey {
            s: 1,
            t: 1,
            b0: 1,
            bs: 1,
            c0: 1,
            ct: 1,
        };
        let v = enumerate_v(2, &CoeffSet::pm1(), key, CensusOptions::default()).unwrap();
        assert!(v.satisfiable);
        assert!(v.members.is_empty());
    }

    #[test]
    fn v_bound_small_cases() {
        let set = CoeffSet::pm1();
        let r3 = check_v_bound(3, &set, CensusOptions::default()).unwrap();
        assert_eq!(r3.census, BigInt::from(8));
        assert!(r3.all_keys_within_bound);
        assert!(r3.covering_holds);
        assert!(BigInt::from(r3.max_v) <= r3.per_key_bound);

        let r2 = check_v_bound(2, &set, CensusOptions::default()).unwrap();
        assert_eq!(r2.max_v, 0);
        assert_eq!(r2.census, BigInt::zero());
    }

    #[test]
    fn v_rows_agree_with_direct_enumeration() {
        let set = CoeffSet::pm1();
        let report = check_v_bound(4, &set, CensusOptions::default()).unwrap();
        for row in report.rows.iter().take(12) {
            let key = VKey {
                s: row.s,
                t: row.t,
                b0: row.b0,
                bs: row.bs,
                c0: row.c0,
                ct: row.ct,
            };
            let v = enumerate_v(4, &set, key, CensusOptions::default()).unwrap();
            assert_eq!(v.members.len() as u64, row.v, "key {key:?}");
        }
    }

    #[test]
    fn signed_divisor_enumeration() {
        assert_eq!(signed_divisors(1), vec![1, -1]);
        assert_eq!(signed_divisors(-6), vec![1, -1, 2, -2, 3, -3, 6, -6]);
    }
}
