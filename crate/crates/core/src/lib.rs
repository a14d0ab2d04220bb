//! Constrained Traveling Salesman encodings and a feasible-subspace QAOA
//! simulator with a per-register Grover mixer.
//!
//! The crate is `no_std` (it needs `alloc`) so the numerical kernels can be
//! embedded anywhere. File formats, timing and the command line live in the
//! companion `clqaoa` crate.
//!
//! Module map:
//!
//! - [`matrix`], [`constraints`], [`problem`], [`qubo`]: the cost model, from
//!   raw travel costs to the one-hot QUBO and its Ising expansion.
//! - [`qaoa`]: the `n^n` subspace simulator, a full `2^(n^2)` reference
//!   simulator for tiny instances, and the variational loop.
//! - [`oracle`]: Held–Karp, enumeration, and cost extremes for the ratio
//!   metrics.
//! - [`heuristics`]: simulated annealing, ant colony, 2-opt.
//! - [`cluster`]: agglomerative clustering and the recursive clustered solver.
//! - [`metrics`]: approximation ratios, shot planners, curve fits.
//! - [`instances`]: seeded instance generators.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod clock;
pub mod cluster;
pub mod constraints;
mod error;
pub mod heuristics;
pub mod instances;
pub(crate) mod math;
pub mod matrix;
pub mod metrics;
pub mod optim;
pub mod oracle;
pub mod problem;
pub mod qaoa;
pub mod qubo;
pub mod rng;
pub mod tour;

pub use error::{Error, Result};
pub use matrix::CostMatrix;
pub use constraints::{ConstraintSet, PenaltyWeights};
pub use problem::{SequenceState, TspProblem};

/// Absolute tolerance used when comparing costs.
pub const COST_TOL: f64 = 1e-9;
