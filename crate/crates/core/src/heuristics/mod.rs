//! Classical baselines on closed tours: simulated annealing, ant colony
//! optimization, and a first-improvement 2-opt polish applied to both.

mod aco;
mod sa;
mod two_opt;

pub use aco::{ant_colony, ant_colony_observed, transition_weights, AcoConfig, AcoStep};
pub use sa::{simulated_annealing, simulated_annealing_observed, temperature, SaConfig, SaStep};
pub use two_opt::{improving_reversal, two_opt};

use crate::{CostMatrix, Error, Result};

/// Result of a heuristic run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeuristicTour {
    pub tour: alloc::vec::Vec<usize>,
    pub cost: f64,
}

fn require_three(cost: &CostMatrix) -> Result<()> {
    if cost.n() < 3 {
        return Err(Error::InvalidArgument("heuristics need at least 3 cities".into()));
    }
    Ok(())
}
