//! Exhaustive, parallel enumeration of coefficient-constrained polynomials
//! with exact counting of the reducible ones.
//!
//! Enumeration order is a mixed-radix odometer over coefficient indices with
//! a_0 fastest, so witness lists are deterministic. Work is partitioned by
//! the top coefficient digits into shards that enumerate independent
//! sub-boxes; counts are summed in shard order, so results are identical
//! for any worker count.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::factor::{factor, is_reducible, Factorization};
use crate::poly::IntPoly;
use crate::serde_util::u128_str;

/// Default cap on enumerated polynomials per run.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// The finite coefficient set S with its nonzero subset S*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffSet {
    elements: Vec<i64>,
    nonzero: Vec<i64>,
}

impl CoeffSet {
    /// Sorted, deduplicated set; must be nonempty.
    pub fn new(values: impl IntoIterator<Item = i64>) -> Result<Self, Error> {
        let mut elements: Vec<i64> = values.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        if elements.is_empty() {
            return Err(Error::InvalidSet("empty coefficient set".into()));
        }
        let nonzero = elements.iter().copied().filter(|&v| v != 0).collect();
        Ok(CoeffSet { elements, nonzero })
    }

    /// {-h, ..., h}.
    pub fn from_height(h: u64) -> Result<Self, Error> {
        if h == 0 {
            return Err(Error::InvalidSet("height must be positive".into()));
        }
        let h = i64::try_from(h).map_err(|_| Error::InvalidSet("height too large".into()))?;
        Self::new(-h..=h)
    }

    /// {-1, 1}.
    pub fn pm1() -> Self {
        Self::new([-1, 1]).unwrap()
    }

    /// {-1, 0, 1}.
    pub fn zero_pm1() -> Self {
        Self::new([-1, 0, 1]).unwrap()
    }

    /// Odd integers in [-2h+1, 2h-1].
    pub fn odd_window(h: u64) -> Result<Self, Error> {
        if h == 0 {
            return Err(Error::InvalidSet("odd window needs h >= 1".into()));
        }
        let h = i64::try_from(h).map_err(|_| Error::InvalidSet("h too large".into()))?;
        Self::new((-2 * h + 1..=2 * h - 1).step_by(2))
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn nonzero(&self) -> &[i64] {
        &self.nonzero
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &CoeffSet) -> bool {
        self.elements.iter().all(|&v| other.contains(v))
    }

    /// Canonical display, e.g. "{-1,0,1}".
    pub fn describe(&self) -> String {
        let body: Vec<String> = self.elements.iter().map(|v| v.to_string()).collect();
        format!("{{{}}}", body.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusMode {
    /// a_0 and a_n both nonzero (drawn from S*).
    Star,
    /// a_0 free over S, a_n nonzero.
    All,
}

/// Deterministic census outcome; this is the JSON result body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusResult {
    pub n: usize,
    pub set: String,
    pub mode: CensusMode,
    #[serde(with = "u128_str")]
    pub total: u128,
    #[serde(with = "u128_str")]
    pub reducible: u128,
}

/// A census outcome plus run metadata (partition count, wall time). The
/// metadata varies with the worker configuration and host load, so it is
/// kept out of the comparable result body.
#[derive(Debug, Clone)]
pub struct CensusRun {
    pub result: CensusResult,
    pub shards: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy)]
pub struct CensusOptions {
    pub workers: usize,
    pub budget: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            workers: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Iterates coefficient vectors of the degree-n star box (a_0, a_n in S*) in
/// enumeration order. Used by the proof-machinery verifiers, which need the
/// same box and ordering as the census.
pub(crate) fn star_box_iter(n: usize, set: &CoeffSet) -> impl Iterator<Item = Vec<i64>> {
    let ebox = EnumBox::new(n, set, CensusMode::Star);
    BoxIter::new(ebox.slots)
}

pub(crate) struct BoxIter {
    slots: Vec<Vec<i64>>,
    idx: Vec<usize>,
    done: bool,
}

impl BoxIter {
    fn new(slots: Vec<Vec<i64>>) -> Self {
        let done = slots.iter().any(|s| s.is_empty());
        let idx = vec![0usize; slots.len()];
        BoxIter { slots, idx, done }
    }
}

impl Iterator for BoxIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out: Vec<i64> = self
            .idx
            .iter()
            .zip(&self.slots)
            .map(|(&i, slot)| slot[i])
            .collect();
        let mut pos = 0;
        loop {
            if pos == self.slots.len() {
                self.done = true;
                break;
            }
            self.idx[pos] += 1;
            if self.idx[pos] < self.slots[pos].len() {
                break;
            }
            self.idx[pos] = 0;
            pos += 1;
        }
        Some(out)
    }
}

/// Per-coefficient alphabets for one enumeration box, index 0 = a_0.
struct EnumBox {
    slots: Vec<Vec<i64>>,
}

impl EnumBox {
    fn new(n: usize, set: &CoeffSet, mode: CensusMode) -> EnumBox {
        let mut slots = Vec::with_capacity(n + 1);
        let a0: Vec<i64> = match mode {
            CensusMode::Star => set.nonzero().to_vec(),
            CensusMode::All => set.elements().to_vec(),
        };
        slots.push(a0);
        for _ in 1..n {
            slots.push(set.elements().to_vec());
        }
        slots.push(set.nonzero().to_vec());
        EnumBox { slots }
    }

    fn size(&self) -> u128 {
        self.slots
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }
}

struct ShardOutput {
    visited: u128,
    reducible: u128,
    witnesses: Vec<(IntPoly, Factorization)>,
}

/// Splits the box into shards over its top coefficient digits; the prefix
/// length follows ceil(log_|S|(64·workers)), capped so at least a_0 stays
/// inside each shard.
fn prefix_len(base: usize, workers: usize, n_slots: usize) -> usize {
    if base < 2 {
        return 0;
    }
    let target = 64u128.saturating_mul(workers as u128);
    let mut len = 0usize;
    let mut covered = 1u128;
    while covered < target && len + 1 < n_slots {
        covered *= base as u128;
        len += 1;
    }
    len
}

fn enumerate_shard(
    ebox: &EnumBox,
    prefix_positions: usize,
    shard_index: usize,
    witness_limit: usize,
) -> ShardOutput {
    let n_slots = ebox.slots.len();
    let inner = n_slots - prefix_positions;
    let mut coeffs = vec![0i64; n_slots];

    // decode shard index: position n is the slowest digit
    let mut s = shard_index;
    for pos in inner..n_slots {
        let slot = &ebox.slots[pos];
        coeffs[pos] = slot[s % slot.len()];
        s /= slot.len();
    }
    debug_assert_eq!(s, 0);

    let mut idx = vec![0usize; inner];
    for (pos, i) in idx.iter().enumerate() {
        coeffs[pos] = ebox.slots[pos][*i];
    }

    let mut visited = 0u128;
    let mut reducible = 0u128;
    let mut witnesses = Vec::new();
    loop {
        visited += 1;
        let f = IntPoly::from_i64(&coeffs);
        if is_reducible(&f).expect("box polynomials have degree >= 2") {
            reducible += 1;
            if witnesses.len() < witness_limit {
                let fact = factor(&f).expect("nonzero");
                witnesses.push((f, fact));
            }
        }
        // odometer step, a_0 fastest
        let mut pos = 0;
        loop {
            if pos == inner {
                return ShardOutput {
                    visited,
                    reducible,
                    witnesses,
                };
            }
            idx[pos] += 1;
            if idx[pos] < ebox.slots[pos].len() {
                coeffs[pos] = ebox.slots[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            coeffs[pos] = ebox.slots[pos][0];
            pos += 1;
        }
    }
}

fn run_box(
    n: usize,
    set: &CoeffSet,
    mode: CensusMode,
    opts: CensusOptions,
    witness_limit: usize,
) -> Result<(CensusRun, Vec<(IntPoly, Factorization)>), Error> {
    if n < 2 {
        return Err(Error::InvalidSet(format!(
            "census requires degree n >= 2, got {n}"
        )));
    }
    if set.nonzero().is_empty() {
        return Err(Error::InvalidSet(
            "S* is empty: no valid leading/constant coefficients".into(),
        ));
    }
    let ebox = EnumBox::new(n, set, mode);
    let size = ebox.size();
    if size > opts.budget as u128 {
        return Err(Error::BudgetExceeded {
            size: BigInt::from(size),
            budget: opts.budget,
        });
    }

    let start = Instant::now();
    let workers = opts.workers.max(1);
    let plen = prefix_len(set.len(), workers, ebox.slots.len());
    let shards: usize = ebox.slots[ebox.slots.len() - plen..]
        .iter()
        .map(|s| s.len())
        .product();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let outputs: Vec<ShardOutput> = pool.install(|| {
        use rayon::prelude::*;
        (0..shards)
            .into_par_iter()
            .map(|i| enumerate_shard(&ebox, plen, i, witness_limit))
            .collect()
    });

    let mut total = 0u128;
    let mut reducible = 0u128;
    let mut witnesses = Vec::new();
    for out in outputs {
        total += out.visited;
        reducible += out.reducible;
        if witnesses.len() < witness_limit {
            witnesses.extend(out.witnesses);
        }
    }
    witnesses.truncate(witness_limit);
    debug_assert_eq!(total, size);

    let run = CensusRun {
        result: CensusResult {
            n,
            set: set.describe(),
            mode,
            total,
            reducible,
        },
        shards,
        elapsed: start.elapsed(),
    };
    Ok((run, witnesses))
}

/// Exact |R_n^*(S)|: reducible degree-n polynomials with coefficients in S
/// and a_0·a_n != 0.
pub fn count_reducible(n: usize, set: &CoeffSet, opts: CensusOptions) -> Result<CensusRun, Error> {
    run_box(n, set, CensusMode::Star, opts, 0).map(|(run, _)| run)
}

/// Exact census over the height box {-h..h}: mode Star counts R_n^*(h),
/// mode All counts R_n(h) (a_0 free, a_n != 0).
pub fn count_reducible_height(
    n: usize,
    h: u64,
    mode: CensusMode,
    opts: CensusOptions,
) -> Result<CensusRun, Error> {
    let set = CoeffSet::from_height(h)?;
    run_box(n, &set, mode, opts, 0).map(|(run, _)| run)
}

/// First `limit` reducible polynomials in enumeration order, each with its
/// factorization.
pub fn sample_reducible(
    n: usize,
    set: &CoeffSet,
    limit: usize,
    opts: CensusOptions,
) -> Result<Vec<(IntPoly, Factorization)>, Error> {
    run_box(n, set, CensusMode::Star, opts, limit).map(|(_, w)| w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(workers: usize) -> CensusOptions {
        CensusOptions {
            workers,
            budget: DEFAULT_BUDGET,
        }
    }

    #[test]
    fn census_quadratic_pm1_is_zero() {
        let run = count_reducible(2, &CoeffSet::pm1(), opts(2)).unwrap();
        assert_eq!(run.result.total, 8);
        assert_eq!(run.result.reducible, 0);
    }

    #[test]
    fn census_cubic_pm1_is_eight() {
        let run = count_reducible(3, &CoeffSet::pm1(), opts(2)).unwrap();
        assert_eq!(run.result.total, 16);
        assert_eq!(run.result.reducible, 8);
    }

    #[test]
    fn census_cubic_zero_one() {
        let set = CoeffSet::new([0, 1]).unwrap();
        let run = count_reducible(3, &set, opts(1)).unwrap();
        assert_eq!(run.result.total, 4);
        assert_eq!(run.result.reducible, 2);
    }

    #[test]
    fn star_mode_total_formula() {
        for n in 2..=5 {
            let set = CoeffSet::zero_pm1();
            let run = count_reducible(n, &set, opts(2)).unwrap();
            let expect = (set.nonzero().len() as u128).pow(2)
                * (set.len() as u128).pow(n as u32 - 1);
            assert_eq!(run.result.total, expect);
        }
    }

    #[test]
    fn worker_invariance() {
        let set = CoeffSet::zero_pm1();
        let r1 = count_reducible(4, &set, opts(1)).unwrap();
        let r2 = count_reducible(4, &set, opts(2)).unwrap();
        let r8 = count_reducible(4, &set, opts(8)).unwrap();
        assert_eq!(r1.result, r2.result);
        assert_eq!(r1.result, r8.result);
    }

    #[test]
    fn budget_guard_reports_size() {
        let set = CoeffSet::zero_pm1();
        let err = count_reducible(
            4,
            &set,
            CensusOptions {
                workers: 1,
                budget: 10,
            },
        )
        .unwrap_err();
        assert!(err.is_budget());
        match err {
            Error::BudgetExceeded { size, budget } => {
                assert_eq!(size, BigInt::from(4 * 27));
                assert_eq!(budget, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_singleton_set() {
        let set = CoeffSet::new([5]).unwrap();
        let run = count_reducible(3, &set, opts(1)).unwrap();
        assert_eq!(run.result.total, 1);
    }

    #[test]
    fn star_rejects_zero_only_set() {
        let set = CoeffSet::new([0]).unwrap();
        assert!(count_reducible(3, &set, opts(1)).is_err());
    }

    #[test]
    fn witnesses_in_enumeration_order() {
        let set = CoeffSet::new([0, 1]).unwrap();
        let w = sample_reducible(3, &set, 10, opts(2)).unwrap();
        assert_eq!(w.len(), 2);
        // a_0 fastest: 1 + X^3 enumerates before 1 + X + X^2 + X^3
        assert_eq!(w[0].0, IntPoly::from_i64(&[1, 0, 0, 1]));
        assert_eq!(w[1].0, IntPoly::from_i64(&[1, 1, 1, 1]));
        for (f, fact) in &w {
            assert_eq!(&fact.expand(), f);
        }
    }

    #[test]
    fn height_mode_totals() {
        let all = count_reducible_height(3, 1, CensusMode::All, opts(2)).unwrap();
        assert_eq!(all.result.total, 54);
        // |S*|^2·|S|^(n-1) = 4·3
        let star = count_reducible_height(2, 1, CensusMode::Star, opts(2)).unwrap();
        assert_eq!(star.result.total, 12);
    }

    #[test]
    fn mode_all_meets_kuba_lower_bound() {
        // reducible >= h^n for n = 3, h = 1, 2
        for h in [1u64, 2] {
            let run = count_reducible_height(3, h, CensusMode::All, opts(4)).unwrap();
            assert!(run.result.reducible >= (h as u128).pow(3));
        }
    }

    #[test]
    fn describe_is_canonical() {
        assert_eq!(CoeffSet::pm1().describe(), "{-1,1}");
        assert_eq!(CoeffSet::new([3, -3, 1, -1]).unwrap().describe(), "{-3,-1,1,3}");
        assert_eq!(CoeffSet::odd_window(2).unwrap().describe(), "{-3,-1,1,3}");
    }
}
