//! The penalized TSP cost model on visiting sequences and one-hot bitstrings.
//!
//! A visiting sequence `seq[t] = city at step t` is the one-city-per-step
//! slice of the `n^2` one-hot variables `x[i, t]`. The objective is an open
//! path: there is no closing edge from the last step back to the first.

use alloc::vec;
use alloc::vec::Vec;

use crate::constraints::Lambdas;
use crate::{ConstraintSet, CostMatrix, Error, Result};

/// Default cap on the number of entries of the subspace cost table.
pub const DEFAULT_TABLE_CAP: u128 = 100_000_000;

/// `n^n`, or `None` on overflow.
pub fn subspace_size(n: usize) -> Option<u128> {
    (n as u128).checked_pow(n as u32)
}

/// A visiting sequence with its mixed-radix index
/// `idx = Σ_t seq[t] · n^t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SequenceState {
    pub seq: Vec<usize>,
}

impl SequenceState {
    pub fn new(seq: Vec<usize>) -> Self {
        Self { seq }
    }

    pub fn n(&self) -> usize {
        self.seq.len()
    }

    pub fn index(&self) -> usize {
        let n = self.seq.len();
        self.seq.iter().rev().fold(0usize, |acc, &c| acc * n + c)
    }

    pub fn from_index(mut idx: usize, n: usize) -> Self {
        let mut seq = Vec::with_capacity(n);
        for _ in 0..n {
            seq.push(idx % n);
            idx /= n;
        }
        Self { seq }
    }

    /// One-hot image with bit `t * n + i` set iff city `i` is visited at step `t`.
    pub fn to_bits(&self) -> Vec<bool> {
        let n = self.n();
        let mut bits = vec![false; n * n];
        for (t, &c) in self.seq.iter().enumerate() {
            bits[t * n + c] = true;
        }
        bits
    }

    pub fn is_permutation(&self) -> bool {
        crate::tour::is_permutation(&self.seq, self.n())
    }
}

/// Folds BNC and road penalties into the travel costs.
///
/// `ω̃[i][j] = ω[i][j] + λ_k·[k_i == k_j] + λ_R·R[i][j]` for `i != j`; the
/// diagonal stays zero.
pub fn build_effective_matrix(
    cost: &CostMatrix,
    constraints: &ConstraintSet,
) -> Result<CostMatrix> {
    constraints.validate(cost.n())?;
    let l = constraints.resolve_weights(cost)?;
    effective_with(cost, constraints, &l)
}

fn effective_with(cost: &CostMatrix, c: &ConstraintSet, l: &Lambdas) -> Result<CostMatrix> {
    let n = cost.n();
    CostMatrix::from_fn(n, |i, j| {
        let mut v = cost.get(i, j);
        if let Some(k) = &c.bnc {
            // 1 - (k_i XOR k_j)
            if k[i] == k[j] {
                v += l.k;
            }
        }
        if let Some(r) = &c.road {
            if r[i * n + j] {
                v += l.r;
            }
        }
        v
    })
}

/// A cost matrix, its constraints, the resolved weights and the effective
/// matrix. The subspace cost table is built on demand.
#[derive(Debug, Clone)]
pub struct TspProblem {
    cost: CostMatrix,
    constraints: ConstraintSet,
    lambdas: Lambdas,
    effective: CostMatrix,
    table_cap: u128,
    subspace_costs: Option<Vec<f64>>,
}

impl TspProblem {
    pub fn new(cost: CostMatrix, constraints: ConstraintSet) -> Result<Self> {
        constraints.validate(cost.n())?;
        let lambdas = constraints.resolve_weights(&cost)?;
        let effective = effective_with(&cost, &constraints, &lambdas)?;
        Ok(Self {
            cost,
            constraints,
            lambdas,
            effective,
            table_cap: DEFAULT_TABLE_CAP,
            subspace_costs: None,
        })
    }

    pub fn unconstrained(cost: CostMatrix) -> Result<Self> {
        Self::new(cost, ConstraintSet::none())
    }

    pub fn with_table_cap(mut self, cap: u128) -> Self {
        self.table_cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.cost.n()
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.cost
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn lambdas(&self) -> &Lambdas {
        &self.lambdas
    }

    pub fn effective(&self) -> &CostMatrix {
        &self.effective
    }

    pub fn table_cap(&self) -> u128 {
        self.table_cap
    }

    /// Number of subspace states, checked against the table cap.
    pub fn checked_subspace_size(&self) -> Result<usize> {
        let needed = subspace_size(self.n()).unwrap_or(u128::MAX);
        if needed > self.table_cap || needed > usize::MAX as u128 {
            return Err(Error::SizeCap { what: "subspace table", needed, cap: self.table_cap });
        }
        Ok(needed as usize)
    }

    pub fn subspace_costs(&self) -> Option<&[f64]> {
        self.subspace_costs.as_deref()
    }

    /// Builds the `n^n` table of [`tour_cost`] values if it is missing.
    pub fn ensure_subspace_costs(&mut self) -> Result<&[f64]> {
        if self.subspace_costs.is_none() {
            self.subspace_costs = Some(subspace_cost_table(self)?);
        }
        Ok(self.subspace_costs.as_deref().unwrap_or(&[]))
    }

    /// Travel part `D` of a sequence on the effective matrix (open path).
    pub fn path_term(&self, seq: &[usize]) -> f64 {
        seq.windows(2).map(|w| self.effective.get(w[0], w[1])).sum()
    }

    /// `λ_p · Σ_i (visits_i − 1)^2`.
    pub fn visit_penalty(&self, seq: &[usize]) -> f64 {
        let n = self.n();
        let mut visits = vec![0i64; n];
        for &c in seq {
            visits[c] += 1;
        }
        let s: i64 = visits.iter().map(|&v| (v - 1) * (v - 1)).sum();
        self.lambdas.p * s as f64
    }

    /// `λ_T · Σ_t T[seq[t], t]`.
    pub fn time_penalty(&self, seq: &[usize]) -> f64 {
        let n = self.n();
        match &self.constraints.time {
            Some(t) => {
                let hits = seq.iter().enumerate().filter(|&(step, &c)| t[c * n + step]).count();
                self.lambdas.t * hits as f64
            }
            None => 0.0,
        }
    }
}

/// Little-endian odometer step over `{0..n-1}^len`.
pub(crate) fn increment(digits: &mut [usize], n: usize) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < n {
            return;
        }
        *d = 0;
    }
}

/// [`tour_cost`] of every sequence, in index order.
pub fn subspace_cost_table(problem: &TspProblem) -> Result<Vec<f64>> {
    let size = problem.checked_subspace_size()?;
    let n = problem.n();
    let mut table = Vec::with_capacity(size);
    let mut digits = vec![0usize; n];
    for idx in 0..size {
        table.push(tour_cost(problem, &digits));
        if idx + 1 < size {
            increment(&mut digits, n);
        }
    }
    Ok(table)
}

/// Penalized cost of a visiting sequence: open-path travel on the effective
/// matrix, plus the visit-once penalty, plus the time-slot penalty.
pub fn tour_cost(problem: &TspProblem, seq: &[usize]) -> f64 {
    debug_assert_eq!(seq.len(), problem.n());
    problem.path_term(seq) + problem.visit_penalty(seq) + problem.time_penalty(seq)
}

/// Cost of an arbitrary `n^2`-bit assignment, bit `t * n + i` meaning city
/// `i` at step `t`.
///
/// Without `full_canonical` only the visit-once penalty is applied (the
/// one-city-per-step rule is enforced by the mixer instead). With it, the
/// one-city-per-step penalty weighted by `λ_q` is added as well.
pub fn bitstring_cost(problem: &TspProblem, x: &[bool], full_canonical: bool) -> Result<f64> {
    let n = problem.n();
    if x.len() != n * n {
        return Err(Error::Dimension { what: "bitstring", expected: n * n, got: x.len() });
    }
    let bit = |i: usize, t: usize| x[t * n + i];
    let w = problem.effective();
    let l = problem.lambdas();

    let mut travel = 0.0;
    for t in 0..n.saturating_sub(1) {
        for i in (0..n).filter(|&i| bit(i, t)) {
            for j in (0..n).filter(|&j| bit(j, t + 1)) {
                travel += w.get(i, j);
            }
        }
    }

    let mut visit = 0i64;
    for i in 0..n {
        let s = (0..n).filter(|&t| bit(i, t)).count() as i64 - 1;
        visit += s * s;
    }
    let mut total = travel + l.p * visit as f64;

    if let Some(tm) = &problem.constraints().time {
        let hits = (0..n)
            .flat_map(|i| (0..n).map(move |t| (i, t)))
            .filter(|&(i, t)| tm[i * n + t] && bit(i, t))
            .count();
        total += l.t * hits as f64;
    }

    if full_canonical {
        let mut per_step = 0i64;
        for t in 0..n {
            let s = (0..n).filter(|&i| bit(i, t)).count() as i64 - 1;
            per_step += s * s;
        }
        total += l.q * per_step as f64;
    }
    Ok(total)
}
