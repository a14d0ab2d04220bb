use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng as _;

use super::{require_three, two_opt, HeuristicTour};
use crate::math::{ln, powf};
use crate::rng::{rng_from_seed, stable_hash};
use crate::tour::route_cost_unchecked;
use crate::{CostMatrix, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AcoConfig {
    pub alpha: f64,
    /// `None` means `2 + ln n`.
    pub beta: Option<f64>,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_init: f64,
    /// `None` means `min(2n, 50)`.
    pub ants: Option<usize>,
    /// `None` means `100 + 3n`.
    pub iterations: Option<usize>,
    pub evaporation: f64,
    pub seed: u64,
}

impl Default for AcoConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: None,
            tau_min: 0.01,
            tau_max: 5.0,
            tau_init: 1.0,
            ants: None,
            iterations: None,
            evaporation: 0.1,
            seed: 0,
        }
    }
}

impl AcoConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// State after one pheromone update.
#[derive(Debug, Clone, Copy)]
pub struct AcoStep<'a> {
    pub iteration: usize,
    /// Row-major `n x n`.
    pub pheromone: &'a [f64],
    pub best: f64,
}

/// Unnormalized roulette weights `τ^α · (1/d)^β` from `from` to each city of
/// `candidates`.
pub fn transition_weights(
    cost: &CostMatrix,
    pheromone: &[f64],
    alpha: f64,
    beta: f64,
    from: usize,
    candidates: &[usize],
) -> Vec<f64> {
    let n = cost.n();
    candidates.iter().map(|&j| powf(pheromone[from * n + j], alpha) * powf(1.0 / cost.get(from, j), beta)).collect()
}

pub fn ant_colony(cost: &CostMatrix, config: &AcoConfig) -> Result<HeuristicTour> {
    ant_colony_observed(cost, config, |_| {})
}

/// Ant colony optimization on closed tours. Pheromone evaporates everywhere,
/// the best tour so far deposits `Q / L_best` on its directed edges with `Q`
/// the mean off-diagonal cost, and every value is clamped to
/// `[tau_min, tau_max]`. Ant `a` of iteration `i` draws from its own stream.
pub fn ant_colony_observed(
    cost: &CostMatrix,
    config: &AcoConfig,
    mut observe: impl FnMut(&AcoStep<'_>),
) -> Result<HeuristicTour> {
    require_three(cost)?;
    let n = cost.n();
    for i in 0..n {
        for j in 0..n {
            if i != j && cost.get(i, j) <= 0.0 {
                return Err(Error::ZeroCost(i, j));
            }
        }
    }
    if !(config.tau_min > 0.0 && config.tau_min < config.tau_max) {
        return Err(Error::InvalidArgument("need 0 < tau_min < tau_max".into()));
    }
    if !(config.evaporation > 0.0 && config.evaporation < 1.0) {
        return Err(Error::InvalidArgument("evaporation must lie in (0, 1)".into()));
    }
    let beta = config.beta.unwrap_or(2.0 + ln(n as f64));
    let ants = config.ants.unwrap_or((2 * n).min(50));
    let iters = config.iterations.unwrap_or(100 + 3 * n);
    if ants == 0 || iters == 0 {
        return Err(Error::InvalidArgument("ants and iterations must be >= 1".into()));
    }
    let q = cost.off_diagonal().sum::<f64>() / (n * (n - 1)) as f64;

    let mut tau = vec![config.tau_init.clamp(config.tau_min, config.tau_max); n * n];
    let mut best: Vec<usize> = Vec::new();
    let mut best_cost = f64::INFINITY;

    for it in 0..iters {
        for a in 0..ants {
            let mut rng = rng_from_seed(stable_hash(config.seed, &[it as u64, a as u64]));
            let start = rng.gen_range(0..n);
            let mut tour = Vec::with_capacity(n);
            tour.push(start);
            let mut left: Vec<usize> = (0..n).filter(|&c| c != start).collect();
            while !left.is_empty() {
                let from = *tour.last().unwrap_or(&start);
                let w = transition_weights(cost, &tau, config.alpha, beta, from, &left);
                let pick = match WeightedIndex::new(&w) {
                    Ok(d) => d.sample(&mut rng),
                    Err(_) => 0,
                };
                tour.push(left.remove(pick));
            }
            let c = route_cost_unchecked(cost, &tour, true);
            if c < best_cost {
                best_cost = c;
                best = tour;
            }
        }
        for t in tau.iter_mut() {
            *t *= 1.0 - config.evaporation;
        }
        let deposit = q / best_cost;
        for k in 0..n {
            let (i, j) = (best[k], best[(k + 1) % n]);
            tau[i * n + j] += deposit;
        }
        for t in tau.iter_mut() {
            *t = t.clamp(config.tau_min, config.tau_max);
        }
        observe(&AcoStep { iteration: it, pheromone: &tau, best: best_cost });
    }

    let tour = two_opt(cost, &best)?;
    let c = route_cost_unchecked(cost, &tour, true);
    Ok(HeuristicTour { tour, cost: c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_candidate_and_uniform_weights() {
        let m = CostMatrix::from_fn(4, |_, _| 3.0).unwrap();
        let tau = vec![1.0; 16];
        let w = transition_weights(&m, &tau, 1.0, 2.0, 0, &[2]);
        assert_eq!(w.len(), 1);
        assert!(w[0] > 0.0);
        let w = transition_weights(&m, &tau, 1.0, 2.0, 0, &[1, 2, 3]);
        assert!(w.iter().all(|&x| x == w[0]));
    }

    #[test]
    fn rejects_zero_cost() {
        let m = CostMatrix::from_fn(3, |i, j| if (i, j) == (1, 2) { 0.0 } else { 1.0 }).unwrap();
        assert_eq!(ant_colony(&m, &AcoConfig::default()), Err(Error::ZeroCost(1, 2)));
    }

    #[test]
    fn deterministic() {
        let m = CostMatrix::from_fn(6, |i, j| ((i * 7 + j * 3) % 11 + 1) as f64).unwrap();
        let cfg = AcoConfig::default().with_seed(4);
        assert_eq!(ant_colony(&m, &cfg).unwrap(), ant_colony(&m, &cfg).unwrap());
    }
}
