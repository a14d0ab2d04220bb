//! Seeded instance generators.

use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, Uniform};
use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::{ConstraintSet, CostMatrix, Error, Result};

/// Off-diagonal entries drawn independently from `U[0, 10]`, row by row.
pub fn gen_synthetic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CostMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 cities".into()));
    }
    let dist = Uniform::new_inclusive(0.0, 10.0);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                data[i * n + j] = dist.sample(rng);
            }
        }
    }
    CostMatrix::from_row_major(n, data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ConstraintKind {
    None,
    Bnc,
    Road,
    Time,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 4] = [Self::None, Self::Bnc, Self::Road, Self::Time];

    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Bnc => "bnc",
            Self::Road => "road",
            Self::Time => "time",
        }
    }
}

/// Density of forbidden roads or slots in generated instances.
pub const CONSTRAINT_DENSITY: f64 = 0.2;
const MAX_ATTEMPTS: usize = 10_000;
/// Largest `n` for which feasibility can be decided.
pub const FEASIBILITY_MAX: usize = 20;

/// Whether some permutation avoids every forbidden road and slot.
pub fn has_feasible_tour(constraints: &ConstraintSet, n: usize) -> Result<bool> {
    if n > FEASIBILITY_MAX {
        return Err(Error::SizeCap { what: "feasibility check cities", needed: n as u128, cap: FEASIBILITY_MAX as u128 });
    }
    let road_ok = |i: usize, j: usize| constraints.road.as_ref().map_or(true, |r| !r[i * n + j]);
    let slot_ok = |i: usize, t: usize| constraints.time.as_ref().map_or(true, |tm| !tm[i * n + t]);
    // reach[mask] has bit `last` set when some path covering `mask` ends at `last`.
    let mut reach = vec![0u32; 1 << n];
    for i in 0..n {
        if slot_ok(i, 0) {
            reach[1 << i] |= 1 << i;
        }
    }
    for mask in 1usize..(1 << n) {
        let ends = reach[mask];
        if ends == 0 {
            continue;
        }
        let t = mask.count_ones() as usize;
        for last in (0..n).filter(|&l| ends & (1 << l) != 0) {
            for j in (0..n).filter(|&j| mask & (1 << j) == 0) {
                if road_ok(last, j) && slot_ok(j, t) {
                    reach[mask | (1 << j)] |= 1 << j;
                }
            }
        }
    }
    Ok(reach[(1 << n) - 1] != 0)
}

/// A random balanced category split: `n / 2` cities get `true`.
pub fn gen_bnc<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<bool> {
    let mut k = vec![false; n];
    for i in index::sample(rng, n, n / 2) {
        k[i] = true;
    }
    k
}

fn gen_mask<R: Rng + ?Sized>(n: usize, density: f64, skip_diagonal: bool, rng: &mut R) -> Vec<bool> {
    let mut m = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            if !(skip_diagonal && i == j) {
                m[i * n + j] = rng.gen_bool(density);
            }
        }
    }
    m
}

/// One constraint family drawn at random, resampled until a feasible tour
/// exists.
pub fn gen_constraints<R: Rng + ?Sized>(kind: ConstraintKind, n: usize, rng: &mut R) -> Result<ConstraintSet> {
    match kind {
        ConstraintKind::None => Ok(ConstraintSet::none()),
        ConstraintKind::Bnc => Ok(ConstraintSet::none().with_bnc(gen_bnc(n, rng))),
        ConstraintKind::Road | ConstraintKind::Time => {
            for _ in 0..MAX_ATTEMPTS {
                let set = if kind == ConstraintKind::Road {
                    ConstraintSet::none().with_road(gen_mask(n, CONSTRAINT_DENSITY, true, rng))
                } else {
                    ConstraintSet::none().with_time(gen_mask(n, CONSTRAINT_DENSITY, false, rng))
                };
                if has_feasible_tour(&set, n)? {
                    return Ok(set);
                }
            }
            Err(Error::Generation(alloc::format!("no feasible {} instance after {MAX_ATTEMPTS} draws", kind.name())))
        }
    }
}

/// `n` items drawn uniformly without replacement from the first `2n` of
/// `ranked`, returned in rank order.
pub fn sample_top_subset<T: Clone, R: Rng + ?Sized>(ranked: &[T], n: usize, rng: &mut R) -> Result<Vec<T>> {
    if n == 0 || ranked.len() < 2 * n {
        return Err(Error::InvalidArgument(alloc::format!(
            "need at least {} ranked entries, got {}",
            2 * n,
            ranked.len()
        )));
    }
    let mut picks = index::sample(rng, 2 * n, n).into_vec();
    picks.sort_unstable();
    Ok(picks.into_iter().map(|i| ranked[i].clone()).collect())
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}
