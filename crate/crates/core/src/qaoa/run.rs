use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use core::f64::consts::TAU;
use rand::Rng as _;

use super::state::{QaoaParams, SubspaceState};
use crate::clock::{Clock, NoClock};
use crate::optim::Cobyla;
use crate::problem::subspace_cost_table;
use crate::rng::{rng_from_seed, Rng};
use crate::{Error, Result, SequenceState, TspProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ObjectiveMode {
    /// Mean cost of `shots` measurement outcomes.
    Sampled,
    /// Exact expectation of the state.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QaoaConfig {
    pub p: usize,
    pub shots: usize,
    pub final_shots: usize,
    pub max_iters: usize,
    pub objective: ObjectiveMode,
    pub seed: u64,
    pub rho_begin: f64,
    pub rho_end: f64,
}

impl QaoaConfig {
    /// Sampled objective, `final_shots = shots`, 200 iterations, seed 0.
    pub fn new(p: usize, shots: usize) -> Self {
        Self {
            p,
            shots,
            final_shots: shots,
            max_iters: 200,
            objective: ObjectiveMode::Sampled,
            seed: 0,
            rho_begin: 0.5,
            rho_end: 1e-3,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_objective(mut self, objective: ObjectiveMode) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_final_shots(mut self, s: usize) -> Self {
        self.final_shots = s;
        self
    }

    pub fn with_max_iters(mut self, m: usize) -> Self {
        self.max_iters = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.shots == 0 || self.final_shots == 0 || self.max_iters == 0 {
            return Err(Error::InvalidArgument("p, shots, final_shots and max_iters must be >= 1".into()));
        }
        if !(self.rho_begin > 0.0 && self.rho_end > 0.0 && self.rho_end <= self.rho_begin) {
            return Err(Error::InvalidArgument("need 0 < rho_end <= rho_begin".into()));
        }
        Ok(())
    }
}

/// Seconds spent per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseTimes {
    pub init: f64,
    pub optimize: f64,
    pub sample: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QaoaRunRecord {
    pub best_sequence: SequenceState,
    pub best_cost: f64,
    /// Exact expectation of the optimized state.
    pub final_expectation: f64,
    /// Objective value of the optimized parameters as seen by the optimizer.
    pub final_objective: f64,
    pub params: QaoaParams,
    pub iterations_used: usize,
    pub converged: bool,
    /// Outcomes of the final sampling round.
    pub shot_histogram: BTreeMap<usize, u64>,
    pub wall_times: PhaseTimes,
}

struct Best {
    idx: usize,
    cost: f64,
}

impl Best {
    fn offer(&mut self, idx: usize, cost: f64) {
        if cost < self.cost || (cost == self.cost && idx < self.idx) {
            self.idx = idx;
            self.cost = cost;
        }
    }
}

pub fn run_qaoa(problem: &TspProblem, config: &QaoaConfig) -> Result<QaoaRunRecord> {
    run_qaoa_with_clock(problem, config, &NoClock)
}

/// Seeds `(γ, β)` uniformly in `[0, 2π)`, minimizes the configured objective
/// with COBYLA (one evaluation per iteration), then samples the optimized
/// state. The best sequence is tracked over every sample drawn.
pub fn run_qaoa_with_clock(problem: &TspProblem, config: &QaoaConfig, clock: &dyn Clock) -> Result<QaoaRunRecord> {
    config.validate()?;
    let t0 = clock.now();
    let n = problem.n();
    let costs: Cow<'_, [f64]> = match problem.subspace_costs() {
        Some(c) => Cow::Borrowed(c),
        None => Cow::Owned(subspace_cost_table(problem)?),
    };
    let template = SubspaceState::uniform_capped(n, problem.table_cap())?;

    let mut rng: Rng = rng_from_seed(config.seed);
    let p = config.p;
    let mut x0 = Vec::with_capacity(2 * p);
    for _ in 0..2 * p {
        x0.push(rng.gen_range(0.0..TAU));
    }
    let t1 = clock.now();

    let mut best = Best { idx: usize::MAX, cost: f64::INFINITY };
    let mut failure: Option<Error> = None;
    let evolve_at = |theta: &[f64]| -> Result<SubspaceState> {
        let params = QaoaParams::from_flat(theta)?;
        let mut s = template.clone();
        for (&g, &b) in params.gammas.iter().zip(&params.betas) {
            s.apply_phase(&costs, g);
            s.apply_grover_mixer(b);
        }
        Ok(s)
    };

    let optimizer = Cobyla { rho_begin: config.rho_begin, rho_end: config.rho_end, max_evals: config.max_iters };
    let min = optimizer.minimize(
        |theta| {
            let state = match evolve_at(theta) {
                Ok(s) => s,
                Err(e) => {
                    failure.get_or_insert(e);
                    return f64::INFINITY;
                }
            };
            match config.objective {
                ObjectiveMode::Exact => state.expectation_with(&costs),
                ObjectiveMode::Sampled => match state.sample(config.shots, &mut rng) {
                    Ok(hist) => {
                        let mut total = 0.0;
                        for (&idx, &count) in &hist {
                            best.offer(idx, costs[idx]);
                            total += costs[idx] * count as f64;
                        }
                        total / config.shots as f64
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                },
            }
        },
        &x0,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let t2 = clock.now();

    let params = QaoaParams::from_flat(&min.x)?;
    let state = evolve_at(&min.x)?;
    let final_expectation = state.expectation_with(&costs);
    let hist = state.sample(config.final_shots, &mut rng)?;
    for &idx in hist.keys() {
        best.offer(idx, costs[idx]);
    }
    let t3 = clock.now();

    Ok(QaoaRunRecord {
        best_sequence: SequenceState::from_index(best.idx, n),
        best_cost: best.cost,
        final_expectation,
        final_objective: min.f,
        params,
        iterations_used: min.evals,
        converged: min.converged,
        shot_histogram: hist,
        wall_times: PhaseTimes { init: t1 - t0, optimize: t2 - t1, sample: t3 - t2 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CostMatrix;

    fn problem3() -> TspProblem {
        TspProblem::unconstrained(CostMatrix::from_rows(&[vec![0.0, 1.0, 4.0], vec![2.0, 0.0, 1.0], vec![1.0, 3.0, 0.0]]).unwrap())
            .unwrap()
    }

    #[test]
    fn deterministic_given_seed() {
        let p = problem3();
        let cfg = QaoaConfig::new(1, 20).with_seed(7);
        assert_eq!(run_qaoa(&p, &cfg).unwrap(), run_qaoa(&p, &cfg).unwrap());
    }

    #[test]
    fn best_cost_is_min_over_final_samples() {
        let p = problem3();
        let cfg = QaoaConfig::new(1, 30).with_seed(3).with_objective(ObjectiveMode::Exact);
        let r = run_qaoa(&p, &cfg).unwrap();
        let costs = subspace_cost_table(&p).unwrap();
        let m = r.shot_histogram.keys().map(|&i| costs[i]).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_cost, m);
        assert_eq!(r.shot_histogram.values().sum::<u64>(), 30);
        assert!(r.iterations_used <= 200);
    }

    #[test]
    fn iteration_budget_is_respected() {
        let p = problem3();
        let r = run_qaoa(&p, &QaoaConfig::new(2, 5).with_max_iters(7)).unwrap();
        assert_eq!(r.iterations_used, 7);
        assert!(!r.converged);
    }

    #[test]
    fn invalid_config() {
        let p = problem3();
        assert!(run_qaoa(&p, &QaoaConfig::new(0, 5)).is_err());
        assert!(run_qaoa(&p, &QaoaConfig::new(1, 0)).is_err());
        assert!(run_qaoa(&p, &QaoaConfig::new(1, 5).with_max_iters(0)).is_err());
    }
}
