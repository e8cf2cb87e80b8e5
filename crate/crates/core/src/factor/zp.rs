//! Dense polynomial arithmetic over Z/p for small primes, with
//! Cantor-Zassenhaus factorization of monic squarefree inputs.
//!
//! Internal to the factorization pipeline: the degree-set filter needs only
//! the factor-degree multiset (distinct-degree stage), while Hensel lifting
//! needs the full split (equal-degree stage included).

/// Polynomial over Z/p, coefficients in [0, p), constant term first,
/// trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ZpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse mod prime p by Fermat.
fn invm(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    powm(a, p - 2, p)
}

impl ZpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in &mut c {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        ZpPoly { p, c }
    }

    pub fn zero(p: u64) -> Self {
        ZpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        ZpPoly { p, c: vec![1 % p] }
    }

    pub fn x(p: u64) -> Self {
        ZpPoly::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn add(&self, rhs: &ZpPoly) -> ZpPoly {
        let p = self.p;
        let n = self.c.len().max(rhs.c.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = rhs.c.get(i).copied().unwrap_or(0);
            *o = addm(a, b, p);
        }
        ZpPoly::new(p, out)
    }

    pub fn sub(&self, rhs: &ZpPoly) -> ZpPoly {
        let p = self.p;
        let n = self.c.len().max(rhs.c.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = rhs.c.get(i).copied().unwrap_or(0);
            *o = subm(a, b, p);
        }
        ZpPoly::new(p, out)
    }

    pub fn mul(&self, rhs: &ZpPoly) -> ZpPoly {
        if self.is_zero() || rhs.is_zero() {
            return ZpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + rhs.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.c.iter().enumerate() {
                out[i + j] = addm(out[i + j], mulm(a, b, p), p);
            }
        }
        ZpPoly::new(p, out)
    }

    pub fn scale(&self, k: u64) -> ZpPoly {
        let p = self.p;
        ZpPoly::new(p, self.c.iter().map(|&a| mulm(a, k, p)).collect())
    }

    pub fn make_monic(&self) -> ZpPoly {
        if self.is_zero() || self.lc() == 1 {
            return self.clone();
        }
        self.scale(invm(self.lc(), self.p))
    }

    /// Division with remainder; divisor must be nonzero.
    pub fn divrem(&self, d: &ZpPoly) -> (ZpPoly, ZpPoly) {
        let p = self.p;
        let dd = d.deg().expect("division by zero polynomial");
        if self.c.len() < d.c.len() {
            return (ZpPoly::zero(p), self.clone());
        }
        let inv_lc = invm(d.lc(), p);
        let mut rem = self.c.clone();
        let mut quot = vec![0u64; self.c.len() - d.c.len() + 1];
        for k in (0..quot.len()).rev() {
            let head = rem[k + dd];
            if head == 0 {
                continue;
            }
            let q = mulm(head, inv_lc, p);
            quot[k] = q;
            for (i, &dc) in d.c.iter().enumerate() {
                rem[k + i] = subm(rem[k + i], mulm(dc, q, p), p);
            }
        }
        (ZpPoly::new(p, quot), ZpPoly::new(p, rem))
    }

    pub fn rem(&self, d: &ZpPoly) -> ZpPoly {
        self.divrem(d).1
    }

    pub fn derivative(&self) -> ZpPoly {
        let p = self.p;
        if self.c.len() <= 1 {
            return ZpPoly::zero(p);
        }
        ZpPoly::new(
            p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| mulm(a, (i as u64) % p, p))
                .collect(),
        )
    }

    /// Monic gcd.
    pub fn gcd(&self, rhs: &ZpPoly) -> ZpPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Extended Euclid: returns (g, s, t) with s·a + t·b = g, g monic.
    /// When gcd(a, b) = 1 the Bezout pair satisfies deg s < deg b and
    /// deg t < deg a, as Hensel lifting requires.
    pub fn eea(a: &ZpPoly, b: &ZpPoly) -> (ZpPoly, ZpPoly, ZpPoly) {
        let p = a.p;
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (ZpPoly::one(p), ZpPoly::zero(p));
        let (mut t0, mut t1) = (ZpPoly::zero(p), ZpPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = invm(r0.lc(), p);
        (r0.scale(k), s0.scale(k), t0.scale(k))
    }

    /// self^e mod f by square-and-multiply.
    pub fn pow_mod(&self, mut e: u64, f: &ZpPoly) -> ZpPoly {
        let mut base = self.rem(f);
        let mut acc = ZpPoly::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(f);
            }
            base = base.mul(&base).rem(f);
            e >>= 1;
        }
        acc
    }

    /// True iff gcd(f, f') = 1 (monic-insensitive squarefree test).
    pub fn is_squarefree(&self) -> bool {
        let d = self.derivative();
        if d.is_zero() {
            // in char p a vanishing derivative means a p-th power (or constant)
            return self.deg() == Some(0) || self.is_zero();
        }
        self.gcd(&d).is_one()
    }
}

/// Distinct-degree stage only: multiset of irreducible factor degrees of a
/// monic squarefree f, as (degree, count) pairs in increasing degree order.
pub(crate) fn ddf_degree_multiset(f: &ZpPoly) -> Vec<(usize, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.make_monic();
    let mut h = ZpPoly::x(p).rem(&rest);
    let mut d = 0usize;
    while rest.deg().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p, &rest); // now x^(p^d) mod rest
        let probe = h.sub(&ZpPoly::x(p));
        let g = rest.gcd(&probe);
        if let Some(gd) = g.deg() {
            if gd > 0 {
                out.push((d, gd / d));
                rest = rest.divrem(&g).0;
                h = h.rem(&rest);
            }
        }
    }
    if let Some(rd) = rest.deg() {
        if rd > 0 {
            out.push((rd, 1));
        }
    }
    out
}

/// Full distinct-degree factorization: (product-of-degree-d-factors, d) parts.
fn ddf_parts(f: &ZpPoly) -> Vec<(ZpPoly, usize)> {
    let p = f.p;
    let mut parts = Vec::new();
    let mut rest = f.make_monic();
    let mut h = ZpPoly::x(p).rem(&rest);
    let mut d = 0usize;
    while rest.deg().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p, &rest);
        let probe = h.sub(&ZpPoly::x(p));
        let g = rest.gcd(&probe);
        if g.deg().unwrap_or(0) > 0 {
            parts.push((g.clone(), d));
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
        }
    }
    if rest.deg().unwrap_or(0) > 0 {
        let d = rest.deg().unwrap();
        parts.push((rest, d));
    }
    parts
}

/// Deterministic stream of candidate polynomials for equal-degree splitting:
/// walks degrees 1, 2, ... with odometer coefficients, skipping constants.
struct CandidateStream {
    p: u64,
    deg: usize,
    counter: u64,
}

impl CandidateStream {
    fn new(p: u64) -> Self {
        CandidateStream {
            p,
            deg: 1,
            counter: 0,
        }
    }

    fn next(&mut self) -> ZpPoly {
        let p = self.p;
        // coefficients a_0..a_{deg} from the counter in base p, forcing a
        // nonzero leading coefficient
        let mut c = Vec::with_capacity(self.deg + 1);
        let mut v = self.counter;
        for _ in 0..self.deg {
            c.push(v % p);
            v /= p;
        }
        c.push(1 + (v % (p - 1).max(1)));
        self.counter += 1;
        if v >= (p - 1).max(1) {
            self.deg += 1;
            self.counter = 0;
        }
        ZpPoly::new(p, c)
    }
}

/// Equal-degree splitting of a monic squarefree product of degree-d
/// irreducibles. Candidates come from a deterministic stream so repeated
/// runs factor identically.
fn edf(f: &ZpPoly, d: usize, stream: &mut CandidateStream, out: &mut Vec<ZpPoly>) {
    let n = f.deg().unwrap();
    if n == d {
        out.push(f.make_monic());
        return;
    }
    let p = f.p;
    loop {
        let a = stream.next().rem(f);
        if a.deg().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map over F_{2^d}: a + a^2 + a^4 + ... + a^(2^(d-1))
            let mut acc = a.clone();
            let mut t = a.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            // a^((p^d - 1)/2) - 1; exponent taken stepwise to avoid overflow:
            // a^((p^d-1)/2) = (a^((p-1)/2))^(1 + p + p^2 + ... + p^(d-1)) does
            // not hold in general, so iterate the exponentiation directly.
            pow_mod_pd_half(&a, d, f).sub(&ZpPoly::one(p))
        };
        let g = f.gcd(&b);
        let gd = g.deg().unwrap_or(0);
        if gd > 0 && gd < n {
            let (q, _) = f.divrem(&g);
            edf(&g, d, stream, out);
            edf(&q, d, stream, out);
            return;
        }
    }
}

/// a^((p^d - 1)/2) mod f without forming p^d: write (p^d - 1)/2 =
/// (p-1)/2 · (p^(d-1) + ... + 1) + ... — simpler and still cheap at our sizes:
/// repeated squaring over the exponent's base-p digits.
fn pow_mod_pd_half(a: &ZpPoly, d: usize, f: &ZpPoly) -> ZpPoly {
    let p = f.p;
    // e = (p^d - 1)/2 = (p-1)/2 * (p^(d-1) + p^(d-2) + ... + 1)
    // so a^e = b^(sum p^i) with b = a^((p-1)/2); each p-th power step is a
    // plain pow_mod with exponent p.
    let b = a.pow_mod((p - 1) / 2, f);
    let mut acc = b.clone(); // b^(p^0)
    let mut frob = b.clone();
    for _ in 1..d {
        frob = frob.pow_mod(p, f); // b^(p^i)
        acc = acc.mul(&frob).rem(f);
    }
    acc
}

/// Factors a monic squarefree polynomial into monic irreducibles,
/// deterministically ordered by (degree, coefficient sequence).
pub(crate) fn factor_monic_squarefree(f: &ZpPoly) -> Vec<ZpPoly> {
    debug_assert!(f.is_squarefree(), "caller must pass a squarefree image");
    let mut out = Vec::new();
    if f.deg().unwrap_or(0) == 0 {
        return out;
    }
    let mut stream = CandidateStream::new(f.p);
    for (part, d) in ddf_parts(f) {
        edf(&part, d, &mut stream, &mut out);
    }
    out.sort_by(|a, b| a.c.len().cmp(&b.c.len()).then_with(|| a.c.cmp(&b.c)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(p: u64, c: &[u64]) -> ZpPoly {
        ZpPoly::new(p, c.to_vec())
    }

    #[test]
    fn divrem_reconstructs() {
        let f = zp(7, &[3, 0, 5, 1]);
        let d = zp(7, &[2, 3]);
        let (q, r) = f.divrem(&d);
        assert_eq!(q.mul(&d).add(&r), f);
        assert!(r.deg().unwrap_or(0) < d.deg().unwrap());
    }

    #[test]
    fn eea_bezout() {
        let a = zp(5, &[1, 2, 1]); // (x+1)^2? over F5: x^2+2x+1
        let b = zp(5, &[2, 1]); // x+2, coprime to a
        let (g, s, t) = ZpPoly::eea(&a, &b);
        assert!(g.is_one());
        assert!(s.mul(&a).add(&t.mul(&b)).is_one());
    }

    #[test]
    fn factor_squarefree_product_of_linears() {
        // (x-1)(x-2)(x-3) over F7 = x^3 + 3x^2? compute directly
        let f = zp(7, &[6, 1])
            .mul(&zp(7, &[5, 1]))
            .mul(&zp(7, &[4, 1]))
            .make_monic();
        let factors = factor_monic_squarefree(&f);
        assert_eq!(factors.len(), 3);
        let mut prod = ZpPoly::one(7);
        for g in &factors {
            assert_eq!(g.deg(), Some(1));
            prod = prod.mul(g);
        }
        assert_eq!(prod, f);
    }

    #[test]
    fn factor_mixed_degrees_mod2() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible mod 2; times (x+1)
        let f = zp(2, &[1, 1, 1, 1, 1]).mul(&zp(2, &[1, 1]));
        assert!(f.is_squarefree());
        let factors = factor_monic_squarefree(&f);
        let degs: Vec<_> = factors.iter().map(|g| g.deg().unwrap()).collect();
        assert_eq!(degs, vec![1, 4]);
    }

    #[test]
    fn ddf_multiset_matches_full_factorization() {
        // (x^2+1)(x^2+x+2) over F3: both irreducible? x^2+1 has roots? 0,1,2 ->
        // 1,2,2: no roots, irreducible. x^2+x+2: 2,1,2: no roots, irreducible.
        let f = zp(3, &[1, 0, 1]).mul(&zp(3, &[2, 1, 1]));
        assert!(f.is_squarefree());
        assert_eq!(ddf_degree_multiset(&f), vec![(2, 2)]);
        assert_eq!(factor_monic_squarefree(&f).len(), 2);
    }

    #[test]
    fn squarefree_detects_repeats() {
        let f = zp(5, &[1, 1]).mul(&zp(5, &[1, 1]));
        assert!(!f.is_squarefree());
        assert!(zp(5, &[1, 1]).mul(&zp(5, &[2, 1])).is_squarefree());
    }
}
