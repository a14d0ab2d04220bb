use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{require_three, two_opt, HeuristicTour};
use crate::math::{ceil, exp, ln, sqrt};
use crate::rng::rng_from_seed;
use crate::tour::route_cost_unchecked;
use crate::{CostMatrix, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SaConfig {
    /// `None` means `100 n^2`.
    pub iterations: Option<usize>,
    pub reheat_factor: f64,
    /// Reheat after `ceil(fraction * K)` iterations without a new best.
    pub stagnation_fraction: f64,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self { iterations: None, reheat_factor: 1.2, stagnation_fraction: 0.01, seed: 0 }
    }
}

impl SaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// `T_k = T_0 / (1 + ln(1 + k))`.
pub fn temperature(t0: f64, k: f64) -> f64 {
    t0 / (1.0 + ln(1.0 + k))
}

/// One annealing step as seen by an observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaStep {
    pub k: usize,
    pub temperature: f64,
    pub current: f64,
    pub best: f64,
    pub reheated: bool,
}

fn off_diagonal_std(cost: &CostMatrix) -> f64 {
    let vals: Vec<f64> = cost.off_diagonal().collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    sqrt(vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64)
}

#[derive(Clone, Copy)]
enum Move {
    Swap(usize, usize),
    Insert(usize, usize),
    Reverse(usize, usize),
}

fn apply(t: &mut Vec<usize>, m: Move) {
    match m {
        Move::Swap(i, j) => t.swap(i, j),
        Move::Insert(i, j) => {
            let c = t.remove(i);
            t.insert(j, c);
        }
        Move::Reverse(i, j) => t[i..=j].reverse(),
    }
}

fn undo(t: &mut Vec<usize>, m: Move) {
    match m {
        Move::Insert(i, j) => {
            let c = t.remove(j);
            t.insert(i, c);
        }
        other => apply(t, other),
    }
}

pub fn simulated_annealing(cost: &CostMatrix, config: &SaConfig) -> Result<HeuristicTour> {
    simulated_annealing_observed(cost, config, |_| {})
}

/// Simulated annealing on closed tours with logarithmic cooling and
/// multiplicative reheating, followed by 2-opt on the best tour.
pub fn simulated_annealing_observed(
    cost: &CostMatrix,
    config: &SaConfig,
    mut observe: impl FnMut(&SaStep),
) -> Result<HeuristicTour> {
    require_three(cost)?;
    if config.reheat_factor <= 1.0 || !(config.stagnation_fraction > 0.0 && config.stagnation_fraction < 1.0) {
        return Err(Error::InvalidArgument("need reheat_factor > 1 and 0 < stagnation_fraction < 1".into()));
    }
    let n = cost.n();
    let iters = config.iterations.unwrap_or(100 * n * n);
    if iters == 0 {
        return Err(Error::InvalidArgument("iterations must be >= 1".into()));
    }
    let patience = (ceil(config.stagnation_fraction * iters as f64) as usize).max(1);
    let t0 = off_diagonal_std(cost).max(1e-12);

    let mut rng = rng_from_seed(config.seed);
    let mut cur: Vec<usize> = (0..n).collect();
    cur.shuffle(&mut rng);
    let mut cur_cost = route_cost_unchecked(cost, &cur, true);
    let mut best = cur.clone();
    let mut best_cost = cur_cost;
    let mut heat = 1.0;
    let mut stale = 0usize;

    for k in 0..iters {
        let temp = heat * temperature(t0, k as f64);
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let mv = match rng.gen_range(0..3) {
            0 => Move::Swap(lo, hi),
            1 => Move::Insert(i, j),
            _ => Move::Reverse(lo, hi),
        };
        apply(&mut cur, mv);
        let c = route_cost_unchecked(cost, &cur, true);
        let delta = c - cur_cost;
        let accept = delta <= 0.0 || rng.gen::<f64>() < exp(-delta / temp);
        if accept {
            cur_cost = c;
        } else {
            undo(&mut cur, mv);
        }
        if cur_cost < best_cost {
            best_cost = cur_cost;
            best.clone_from(&cur);
            stale = 0;
        } else {
            stale += 1;
        }
        let reheated = stale >= patience;
        if reheated {
            heat *= config.reheat_factor;
            stale = 0;
        }
        observe(&SaStep { k, temperature: temp, current: cur_cost, best: best_cost, reheated });
    }

    let tour = two_opt(cost, &best)?;
    let cost_final = route_cost_unchecked(cost, &tour, true);
    Ok(HeuristicTour { tour, cost: cost_final })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;

    #[test]
    fn cooling_schedule() {
        assert_eq!(temperature(5.0, 0.0), 5.0);
        assert!((temperature(5.0, E - 1.0) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn insert_undo_roundtrip() {
        let orig: Vec<usize> = (0..6).collect();
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                for m in [Move::Insert(i, j), Move::Swap(i.min(j), i.max(j)), Move::Reverse(i.min(j), i.max(j))] {
                    let mut t = orig.clone();
                    apply(&mut t, m);
                    undo(&mut t, m);
                    assert_eq!(t, orig);
                }
            }
        }
    }

    #[test]
    fn flat_instance_and_small_n() {
        let m = CostMatrix::from_fn(5, |_, _| 2.0).unwrap();
        let r = simulated_annealing(&m, &SaConfig::default()).unwrap();
        assert_eq!(r.cost, 10.0);
        let two = CostMatrix::from_fn(2, |_, _| 1.0).unwrap();
        assert!(simulated_annealing(&two, &SaConfig::default()).is_err());
    }
}
