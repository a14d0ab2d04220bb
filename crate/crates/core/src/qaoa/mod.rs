//! QAOA with a per-register Grover mixer.
//!
//! Every time step is a register of `n` qubits that holds exactly one city.
//! The initial state, the diagonal cost phase and the mixer all preserve
//! that one-hot-per-register slice, so the evolution is simulated exactly on
//! the `n^n` sequence amplitudes ([`SubspaceState`]). [`reference`] runs the
//! same circuit gate by gate in the full `2^(n^2)` space for small `n`.

pub mod reference;
mod run;
mod state;

pub use run::{run_qaoa, run_qaoa_with_clock, ObjectiveMode, PhaseTimes, QaoaConfig, QaoaRunRecord};
pub use state::{evolve, evolve_from, QaoaParams, SubspaceState};

/// Number of two-qubit (`ZZ`) interactions in one cost layer for `n` cities,
/// times `p` layers, counted from the Ising expansion of a dense instance.
pub fn depth_of_circuit_proxy(n: usize, p: usize) -> crate::Result<usize> {
    use crate::{CostMatrix, TspProblem};
    let cost = CostMatrix::from_fn(n, |_, _| 1.0)?;
    let problem = TspProblem::unconstrained(cost)?;
    let (_, zz) = crate::qubo::term_counts(&crate::qubo::ising_terms(&problem));
    Ok(zz * p)
}
