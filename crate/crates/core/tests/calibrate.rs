use polycensus_core::census::{count_reducible, CensusOptions, CoeffSet};
use polycensus_core::factor::is_reducible;
use polycensus_core::IntPoly;
use std::time::Instant;

#[test]
fn calibrate_census() {
    let opts = CensusOptions { workers: 8, budget: 1_000_000_000 };
    let t = Instant::now();
    let run = count_reducible(14, &CoeffSet::pm1(), opts).unwrap();
    println!("pm1 n=14: {:?} reducible={} of {}", t.elapsed(), run.result.reducible, run.result.total);

    let t = Instant::now();
    let run = count_reducible(10, &CoeffSet::zero_pm1(), opts).unwrap();
    println!("zero_pm1 n=10: {:?} reducible={} of {}", t.elapsed(), run.result.reducible, run.result.total);

    let t = Instant::now();
    let run = count_reducible(8, &CoeffSet::odd_window(2).unwrap(), opts).unwrap();
    println!("odd2 n=8: {:?} reducible={} of {}", t.elapsed(), run.result.reducible, run.result.total);
}

#[test]
fn calibrate_box() {
    // degree <= 6, height <= 2 box through is_reducible only
    let t = Instant::now();
    let mut count = 0u64;
    let mut red = 0u64;
    for n in 1..=6usize {
        let mut coeffs = vec![0i64; n + 1];
        let mut idx = vec![0usize; n + 1];
        let vals = [-2i64, -1, 0, 1, 2];
        let lead = [-2i64, -1, 1, 2];
        loop {
            for i in 0..n {
                coeffs[i] = vals[idx[i]];
            }
            coeffs[n] = lead[idx[n]];
            count += 1;
            let f = IntPoly::from_i64(&coeffs);
            if n >= 2 && is_reducible(&f).unwrap() {
                red += 1;
            }
            let mut pos = 0;
            loop {
                if pos > n {
                    break;
                }
                idx[pos] += 1;
                let cap = if pos == n { lead.len() } else { vals.len() };
                if idx[pos] < cap {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos > n {
                break;
            }
        }
    }
    println!("box sweep: {:?} for {} polys, {} reducible", t.elapsed(), count, red);
}
