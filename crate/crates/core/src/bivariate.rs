//! Random bivariate coefficient grids, substitution at a fixed integer, the
//! three-condition reducibility surrogate, and Monte Carlo decay estimation.
//!
//! The surrogate is a necessary-condition test: if none of (a) F(X, y0)
//! reducible, (b) F(y0, Y) reducible, (c) F separable as f(X)·g(Y) holds,
//! the grid is certified irreducible; a hit does not certify reducibility.
//!
//! A note on the probability reading: the substituted polynomial's
//! coefficients are uniform over the balanced-ternary window, but the decay
//! estimates here tally the surrogate event itself rather than assuming any
//! uniformity of the reducibility event.

use std::time::Duration;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::factor::is_reducible;
use crate::poly::IntPoly;

/// Coefficient alphabet presets for the random grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    Pm1,
    ZeroPm1,
}

impl Alphabet {
    pub fn values(self) -> &'static [i64] {
        match self {
            Alphabet::Pm1 => &[-1, 1],
            Alphabet::ZeroPm1 => &[-1, 0, 1],
        }
    }

    /// Substitution base making the per-row digit map injective:
    /// 2 for {±1} digits, 3 for {0,±1} digits.
    pub fn default_y0(self) -> i64 {
        match self {
            Alphabet::Pm1 => 2,
            Alphabet::ZeroPm1 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Alphabet::Pm1 => "pm1",
            Alphabet::ZeroPm1 => "zero_pm1",
        }
    }
}

impl std::str::FromStr for Alphabet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "pm1" => Ok(Alphabet::Pm1),
            "zero_pm1" => Ok(Alphabet::ZeroPm1),
            other => Err(Error::InvalidSet(format!(
                "unknown alphabet '{other}' (expected pm1 or zero_pm1)"
            ))),
        }
    }
}

/// An (n+1)×(n+1) integer coefficient grid; entry (i, j) multiplies X^i·Y^j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BivarPoly {
    grid: Vec<Vec<i64>>,
}

impl BivarPoly {
    pub fn from_grid(grid: Vec<Vec<i64>>) -> Result<Self, Error> {
        let rows = grid.len();
        if rows == 0 || grid.iter().any(|r| r.len() != rows) {
            return Err(Error::BadGrid {
                rows,
                widths: grid.iter().map(|r| r.len()).collect(),
            });
        }
        Ok(BivarPoly { grid })
    }

    /// Grid degree parameter: the grid is (n+1)×(n+1).
    pub fn n(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.grid[i][j]
    }

    pub fn grid(&self) -> &[Vec<i64>] {
        &self.grid
    }

    pub fn is_zero(&self) -> bool {
        self.grid.iter().all(|r| r.iter().all(|&e| e == 0))
    }

    pub fn transpose(&self) -> BivarPoly {
        let w = self.grid.len();
        let grid = (0..w)
            .map(|j| (0..w).map(|i| self.grid[i][j]).collect())
            .collect();
        BivarPoly { grid }
    }
}

/// F(X, y): coefficient of X^i is the row-i digit sum over powers of y.
pub fn substitute_y(f: &BivarPoly, y: i64) -> IntPoly {
    let w = f.grid.len();
    let mut pow = Vec::with_capacity(w);
    let by = BigInt::from(y);
    let mut cur = BigInt::one();
    for _ in 0..w {
        pow.push(cur.clone());
        cur *= &by;
    }
    let coeffs = f
        .grid
        .iter()
        .map(|row| {
            row.iter()
                .zip(&pow)
                .map(|(&e, p)| BigInt::from(e) * p)
                .sum()
        })
        .collect();
    IntPoly::new(coeffs)
}

/// F(x, Y): mirror of [`substitute_y`] with the grid transposed.
pub fn substitute_x(f: &BivarPoly, x: i64) -> IntPoly {
    substitute_y(&f.transpose(), x)
}

/// Height ceiling (3^(n+1) - 1)/2 of F(X, 3) for {0,±1} grids.
pub fn hstar(n: u32) -> BigInt {
    (BigInt::from(3).pow(n + 1) - 1) / 2
}

/// Detects F(X,Y) = f(X)·g(Y): the grid must be rank one with an integer
/// outer-product factorization. Normalization: g's first nonzero coefficient
/// is positive. Returns None when no such split exists.
pub fn separable_split(f: &BivarPoly) -> Result<Option<(IntPoly, IntPoly)>, Error> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let w = f.grid.len();
    let pivot_row = f
        .grid
        .iter()
        .position(|r| r.iter().any(|&e| e != 0))
        .expect("nonzero");

    // primitive, sign-normalized profile of the pivot row
    let mut gcd: i64 = 0;
    for &e in &f.grid[pivot_row] {
        gcd = gcd_i64(gcd, e);
    }
    let first_nz = f.grid[pivot_row].iter().position(|&e| e != 0).unwrap();
    let sign = if f.grid[pivot_row][first_nz] < 0 { -1 } else { 1 };
    let profile: Vec<i64> = f.grid[pivot_row]
        .iter()
        .map(|&e| e / (gcd * sign))
        .collect();
    let pj = profile[first_nz];

    let mut f_coeffs = Vec::with_capacity(w);
    for row in &f.grid {
        let fi = row[first_nz] / pj;
        if row[first_nz] % pj != 0 {
            return Ok(None);
        }
        for (j, &e) in row.iter().enumerate() {
            if (fi as i128) * (profile[j] as i128) != e as i128 {
                return Ok(None);
            }
        }
        f_coeffs.push(fi);
    }
    Ok(Some((
        IntPoly::from_i64(&f_coeffs),
        IntPoly::from_i64(&profile),
    )))
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Outcome of the three-condition surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// F(X, y0) reducible (degenerate outputs of degree <= 1 count as false).
    pub cond1: bool,
    /// F(y0, Y) reducible, same convention.
    pub cond2: bool,
    /// F = f(X)·g(Y) with both parts nonconstant.
    pub cond3: bool,
    pub any: bool,
}

/// Runs the necessary-condition surrogate; `any = false` certifies the grid
/// irreducible, `any = true` certifies nothing.
pub fn surrogate_reducible(f: &BivarPoly, y0: i64) -> Result<ConditionReport, Error> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(conditions(f, y0))
}

fn reducible_nondegenerate(p: &IntPoly) -> bool {
    match p.degree() {
        Some(d) if d >= 2 => is_reducible(p).expect("degree >= 2"),
        _ => false,
    }
}

fn conditions(f: &BivarPoly, y0: i64) -> ConditionReport {
    if f.is_zero() {
        // zero grids appear only inside exhaustive sweeps; nothing holds
        return ConditionReport {
            cond1: false,
            cond2: false,
            cond3: false,
            any: false,
        };
    }
    let cond1 = reducible_nondegenerate(&substitute_y(f, y0));
    let cond2 = reducible_nondegenerate(&substitute_x(f, y0));
    let cond3 = match separable_split(f) {
        Ok(Some((fx, gy))) => fx.degree().unwrap_or(0) >= 1 && gy.degree().unwrap_or(0) >= 1,
        _ => false,
    };
    ConditionReport {
        cond1,
        cond2,
        cond3,
        any: cond1 || cond2 || cond3,
    }
}

/// Monte Carlo (or exhaustive) tally of the surrogate over random grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub n: usize,
    pub alphabet: Alphabet,
    pub y0: i64,
    /// True when the full space was enumerated instead of sampled.
    pub exhaustive: bool,
    /// Grids evaluated (the space size in exhaustive mode).
    pub samples: u64,
    pub seed: u64,
    pub hits_cond1: u64,
    pub hits_cond2: u64,
    pub hits_cond3: u64,
    pub hits_any: u64,
    /// hits_any / samples.
    pub estimate: f64,
    /// Wilson 95% interval half-width.
    pub ci95: f64,
    /// Reference decay envelope n^3 / 3^n.
    pub envelope: f64,
}

/// An estimate plus wall time (kept out of the comparable body).
#[derive(Debug, Clone)]
pub struct McRun {
    pub estimate: McEstimate,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub workers: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            workers: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    c1: u64,
    c2: u64,
    c3: u64,
    any: u64,
}

impl Tally {
    fn merge(self, rhs: Tally) -> Tally {
        Tally {
            c1: self.c1 + rhs.c1,
            c2: self.c2 + rhs.c2,
            c3: self.c3 + rhs.c3,
            any: self.any + rhs.any,
        }
    }

    fn of(report: ConditionReport) -> Tally {
        Tally {
            c1: report.cond1 as u64,
            c2: report.cond2 as u64,
            c3: report.cond3 as u64,
            any: report.any as u64,
        }
    }
}

/// Counter-based stream: sample index i maps to an independent generator
/// keyed by (seed, i), so draws are identical for any parallel schedule.
struct CounterRng {
    state: u64,
}

impl CounterRng {
    fn keyed(seed: u64, index: u64) -> CounterRng {
        let k = seed.wrapping_add((index ^ 0xD1B5_4A32_D192_ED03).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        CounterRng { state: mix64(k) }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    /// Exact uniform draw from 0..k via rejection.
    fn below(&mut self, k: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % k;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % k;
            }
        }
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Grid for sample `index`: entries drawn row-major, (0,0) first.
fn sample_grid(n: usize, alphabet: Alphabet, seed: u64, index: u64) -> BivarPoly {
    let values = alphabet.values();
    let k = values.len() as u64;
    let mut rng = CounterRng::keyed(seed, index);
    let grid = (0..=n)
        .map(|_| (0..=n).map(|_| values[rng.below(k) as usize]).collect())
        .collect();
    BivarPoly { grid }
}

/// Grid for exhaustive rank `index` in base-|alphabet| digits, entry (0,0)
/// the fastest digit.
fn unrank_grid(n: usize, alphabet: Alphabet, index: u64) -> BivarPoly {
    let values = alphabet.values();
    let k = values.len() as u64;
    let mut v = index;
    let grid = (0..=n)
        .map(|_| {
            (0..=n)
                .map(|_| {
                    let e = values[(v % k) as usize];
                    v /= k;
                    e
                })
                .collect()
        })
        .collect();
    BivarPoly { grid }
}

fn wilson_halfwidth(hits: u64, samples: u64) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let z = 1.959_963_984_540_054_f64;
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
}

/// Tallies the three surrogate conditions over grids drawn i.i.d. uniform
/// from the alphabet. Switches to exhaustive enumeration automatically when
/// the whole space is no larger than the requested sample count. `y0`
/// defaults per alphabet (3 for {0,±1}, 2 for {±1}).
pub fn mc_estimate(
    n: usize,
    alphabet: Alphabet,
    samples: u64,
    seed: u64,
    y0: Option<i64>,
    opts: McOptions,
) -> Result<McRun, Error> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if n == 0 {
        return Err(Error::InvalidSet("grid degree n must be >= 1".into()));
    }
    let y0 = y0.unwrap_or_else(|| alphabet.default_y0());
    let start = std::time::Instant::now();

    let cells = (n + 1) * (n + 1);
    let space = BigUint::from(alphabet.values().len()).pow(cells as u32);
    let exhaustive = space <= BigUint::from(samples);
    let count: u64 = if exhaustive {
        u64::try_from(&space).expect("space fits: space <= samples")
    } else {
        samples
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    let tally: Tally = pool.install(|| {
        use rayon::prelude::*;
        (0..count)
            .into_par_iter()
            .map(|i| {
                let grid = if exhaustive {
                    unrank_grid(n, alphabet, i)
                } else {
                    sample_grid(n, alphabet, seed, i)
                };
                Tally::of(conditions(&grid, y0))
            })
            .reduce(Tally::default, Tally::merge)
    });

    let estimate = McEstimate {
        n,
        alphabet,
        y0,
        exhaustive,
        samples: count,
        seed,
        hits_cond1: tally.c1,
        hits_cond2: tally.c2,
        hits_cond3: tally.c3,
        hits_any: tally.any,
        estimate: tally.any as f64 / count as f64,
        ci95: wilson_halfwidth(tally.any, count),
        envelope: (n as f64).powi(3) / 3f64.powi(n as i32),
    };
    Ok(McRun {
        estimate,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn grid(rows: &[&[i64]]) -> BivarPoly {
        BivarPoly::from_grid(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn substitute_examples() {
        // F = 1 + Y + XY, rows [1,1],[0,1]
        let f = grid(&[&[1, 1], &[0, 1]]);
        assert_eq!(substitute_y(&f, 3), IntPoly::from_i64(&[4, 3]));
        assert_eq!(substitute_x(&f, 3), IntPoly::from_i64(&[1, 4]));

        let all_ones = grid(&[&[1, 1], &[1, 1]]);
        assert_eq!(substitute_y(&all_ones, 3), IntPoly::from_i64(&[4, 4]));

        // F = (X+1)(XY+1) = 1 + X + XY + X^2 Y
        let f = grid(&[&[1, 0, 0], &[1, 1, 0], &[0, 1, 0]]);
        assert_eq!(substitute_y(&f, 3), IntPoly::from_i64(&[1, 4, 3]));

        // degenerate: F = 1 + X at x = 3 is the constant 4
        let f = grid(&[&[1, 0], &[1, 0]]);
        assert_eq!(substitute_x(&f, 3), IntPoly::from_i64(&[4]));
    }

    #[test]
    fn substitute_x_is_transposed_substitute_y() {
        let f = grid(&[&[1, -1, 0], &[0, 1, 1], &[-1, 0, 1]]);
        for c in [-2i64, 2, 3, 5] {
            assert_eq!(substitute_x(&f, c), substitute_y(&f.transpose(), c));
        }
    }

    #[test]
    fn hstar_values() {
        assert_eq!(hstar(0), BigInt::from(1));
        assert_eq!(hstar(2), BigInt::from(13));
        assert_eq!(hstar(4), BigInt::from(121));
    }

    #[test]
    fn separable_split_examples() {
        let f = grid(&[&[1, 1], &[1, 1]]);
        let (fx, gy) = separable_split(&f).unwrap().unwrap();
        assert_eq!(fx, IntPoly::from_i64(&[1, 1]));
        assert_eq!(gy, IntPoly::from_i64(&[1, 1]));

        assert!(separable_split(&grid(&[&[1, 0], &[0, 1]])).unwrap().is_none());

        // sign normalization: all -1 entries
        let f = grid(&[&[-1, -1], &[-1, -1]]);
        let (fx, gy) = separable_split(&f).unwrap().unwrap();
        assert_eq!(fx, IntPoly::from_i64(&[-1, -1]));
        assert_eq!(gy, IntPoly::from_i64(&[1, 1]));

        assert!(separable_split(&grid(&[&[0]])).is_err());
    }

    #[test]
    fn separable_split_reconstructs() {
        // rank-1 with mixed magnitudes: f = [2, -3], g profile [1, 0, 2]
        let f = grid(&[&[2, 0, 4], &[-3, 0, -6], &[0, 0, 0]]);
        let (fx, gy) = separable_split(&f).unwrap().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    fx.coeff(i) * gy.coeff(j),
                    BigInt::from(f.entry(i, j)),
                    "entry {i},{j}"
                );
            }
        }
    }

    #[test]
    fn surrogate_examples() {
        // (1+X)(1+Y): separable
        let r = surrogate_reducible(&grid(&[&[1, 1], &[1, 1]]), 3).unwrap();
        assert!(r.cond3 && r.any);

        // 1 + X + Y: nothing holds
        let r = surrogate_reducible(&grid(&[&[1, 1], &[1, 0]]), 3).unwrap();
        assert!(!r.cond1 && !r.cond2 && !r.cond3 && !r.any);

        // (X+1)(XY+1): F(X,3) = (3X+1)(X+1)
        let f = grid(&[&[1, 0, 0], &[1, 1, 0], &[0, 1, 0]]);
        let r = surrogate_reducible(&f, 3).unwrap();
        assert!(r.cond1 && r.any);
    }

    #[test]
    fn balanced_ternary_row_law_exhaustive_n1() {
        // coefficient of X^i in F(X,3) is zero iff row i is all zero
        for idx in 0..81u64 {
            let f = unrank_grid(1, Alphabet::ZeroPm1, idx);
            let p = substitute_y(&f, 3);
            for i in 0..=1usize {
                let row_zero = (0..=1).all(|j| f.entry(i, j) == 0);
                assert_eq!(p.coeff(i).is_zero(), row_zero, "grid {idx} row {i}");
            }
        }
    }

    #[test]
    fn height_law_exhaustive_n1() {
        let cap = hstar(1);
        for idx in 0..81u64 {
            let f = unrank_grid(1, Alphabet::ZeroPm1, idx);
            let p = substitute_y(&f, 3);
            let h = p.height();
            assert!(h <= cap);
            let extremal_row = (0..=1).any(|i| {
                let r: Vec<i64> = (0..=1).map(|j| f.entry(i, j)).collect();
                r.iter().all(|&e| e == 1) || r.iter().all(|&e| e == -1)
            });
            assert_eq!(h == cap, extremal_row, "grid {idx}");
        }
    }

    #[test]
    fn sampling_is_schedule_independent() {
        let a = mc_estimate(
            2,
            Alphabet::ZeroPm1,
            500,
            7,
            None,
            McOptions { workers: 1 },
        )
        .unwrap();
        let b = mc_estimate(
            2,
            Alphabet::ZeroPm1,
            500,
            7,
            None,
            McOptions { workers: 8 },
        )
        .unwrap();
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn exhaustive_cutover() {
        let run = mc_estimate(
            1,
            Alphabet::ZeroPm1,
            1000,
            42,
            None,
            McOptions { workers: 2 },
        )
        .unwrap();
        assert!(run.estimate.exhaustive);
        assert_eq!(run.estimate.samples, 81);
        assert!(run.estimate.hits_any <= run.estimate.samples);
        assert!(
            run.estimate.hits_any
                <= run.estimate.hits_cond1 + run.estimate.hits_cond2 + run.estimate.hits_cond3
        );
    }

    #[test]
    fn separable_outer_products_always_hit_cond3() {
        // random f, g with {0,±1} coefficients, nonconstant
        let mut rng = CounterRng::keyed(99, 0);
        let mut tested = 0;
        while tested < 200 {
            let n = 3usize;
            let fx: Vec<i64> = (0..=n).map(|_| rng.below(3) as i64 - 1).collect();
            let gy: Vec<i64> = (0..=n).map(|_| rng.below(3) as i64 - 1).collect();
            let df = fx.iter().rposition(|&e| e != 0);
            let dg = gy.iter().rposition(|&e| e != 0);
            if df.unwrap_or(0) < 1 || dg.unwrap_or(0) < 1 {
                continue;
            }
            let grid: Vec<Vec<i64>> = fx.iter().map(|&a| gy.iter().map(|&b| a * b).collect()).collect();
            let f = BivarPoly::from_grid(grid).unwrap();
            let r = surrogate_reducible(&f, 3).unwrap();
            assert!(r.cond3, "outer product must be detected separable");
            tested += 1;
        }
    }

    #[test]
    fn rejects_ragged_grid() {
        assert!(BivarPoly::from_grid(vec![vec![1, 2], vec![3]]).is_err());
    }
}
