#![allow(dead_code)]

use clqaoa_core::rng::rng_from_seed;
use clqaoa_core::{ConstraintSet, CostMatrix};
use rand::Rng;

/// Direct evaluation of the one-hot objective from its definition, kept
/// separate from the library code paths.
pub fn brute_energy(cost: &CostMatrix, c: &ConstraintSet, x: &[bool], lam: f64, with_step_penalty: bool) -> f64 {
    let n = cost.n();
    let b = |i: usize, t: usize| if x[t * n + i] { 1.0 } else { 0.0 };
    let w = |i: usize, j: usize| {
        let mut v = cost.get(i, j);
        if let Some(k) = &c.bnc {
            if k[i] == k[j] {
                v += lam;
            }
        }
        if let Some(r) = &c.road {
            if r[i * n + j] {
                v += lam;
            }
        }
        v
    };
    let mut e = 0.0;
    for t in 0..n - 1 {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    e += w(i, j) * b(i, t) * b(j, t + 1);
                }
            }
        }
    }
    for i in 0..n {
        let s: f64 = (0..n).map(|t| b(i, t)).sum::<f64>() - 1.0;
        e += lam * s * s;
    }
    if let Some(tm) = &c.time {
        for i in 0..n {
            for t in 0..n {
                if tm[i * n + t] {
                    e += lam * b(i, t);
                }
            }
        }
    }
    if with_step_penalty {
        for t in 0..n {
            let s: f64 = (0..n).map(|i| b(i, t)).sum::<f64>() - 1.0;
            e += lam * s * s;
        }
    }
    e
}

pub fn random_matrix(n: usize, seed: u64) -> CostMatrix {
    let mut rng = rng_from_seed(seed);
    CostMatrix::from_fn(n, |_, _| rng.gen_range(0.0..10.0)).unwrap()
}

/// All four constraint families with hand-picked patterns.
pub fn constraint_families(n: usize, seed: u64) -> Vec<(&'static str, ConstraintSet)> {
    let mut rng = rng_from_seed(seed);
    let bnc: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    let road: Vec<bool> = (0..n * n).map(|k| k / n != k % n && rng.gen_bool(0.25)).collect();
    let time: Vec<bool> = (0..n * n).map(|_| rng.gen_bool(0.2)).collect();
    vec![
        ("none", ConstraintSet::none()),
        ("bnc", ConstraintSet::none().with_bnc(bnc)),
        ("road", ConstraintSet::none().with_road(road)),
        ("time", ConstraintSet::none().with_time(time)),
    ]
}

pub fn bits_of(k: u64, len: usize) -> Vec<bool> {
    (0..len).map(|q| (k >> q) & 1 == 1).collect()
}
