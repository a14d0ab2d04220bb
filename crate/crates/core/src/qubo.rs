//! The one-hot QUBO of the penalized cost and its Pauli-Z (Ising) expansion.
//!
//! Variable `q = t * n + i` is 1 iff city `i` is visited at step `t`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::{Error, Result, TspProblem};

/// Sparse upper-triangular QUBO: `f(x) = Σ_{a<=b} Q[a][b] x_a x_b + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboMatrix {
    fn add(&mut self, a: usize, b: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        *self.entries.entry(key).or_insert(0.0) += v;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Coefficient of `x_a x_b` (`x_a` when `a == b`); order of the pair is
    /// irrelevant.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    /// Nonzero entries `(a, b, value)` with `a <= b`, sorted.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(a, b), &v)| (a, b, v))
    }

    /// Dense row-major upper-triangular copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = alloc::vec![0.0; self.dim * self.dim];
        for (a, b, v) in self.entries() {
            d[a * self.dim + b] = v;
        }
        d
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Dimension { what: "bitstring", expected: self.dim, got: x.len() });
        }
        Ok(self.offset
            + self
                .entries()
                .filter(|&(a, b, _)| x[a] && x[b])
                .map(|(_, _, v)| v)
                .sum::<f64>())
    }
}

/// QUBO whose value on every bitstring equals
/// [`crate::problem::bitstring_cost`] without the one-city-per-step term.
pub fn qubo_matrix(problem: &TspProblem) -> QuboMatrix {
    let n = problem.n();
    let w = problem.effective();
    let l = problem.lambdas();
    let var = |i: usize, t: usize| t * n + i;
    let mut q = QuboMatrix { dim: n * n, entries: BTreeMap::new(), offset: 0.0 };

    // Travel between consecutive steps.
    for t in 0..n - 1 {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    q.add(var(i, t), var(j, t + 1), w.get(i, j));
                }
            }
        }
    }

    // λ_p (Σ_t x_it − 1)^2 = λ_p (1 − Σ_t x_it + 2 Σ_{t<s} x_it x_is), using x² = x.
    for i in 0..n {
        for t in 0..n {
            q.add(var(i, t), var(i, t), -l.p);
            for s in t + 1..n {
                q.add(var(i, t), var(i, s), 2.0 * l.p);
            }
        }
    }
    q.offset += l.p * n as f64;

    if let Some(tm) = &problem.constraints().time {
        for i in 0..n {
            for t in 0..n {
                if tm[i * n + t] {
                    q.add(var(i, t), var(i, t), l.t);
                }
            }
        }
    }
    q
}

/// One term of the Ising Hamiltonian: a product of Z operators on `qubits`
/// (empty for the identity) with a real coefficient.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PauliTerm {
    pub qubits: Vec<usize>,
    pub coeff: f64,
}

/// Substitutes `x = (1 − Z)/2` into the QUBO and collects identity, `Z` and
/// `ZZ` coefficients. Terms whose coefficient cancels to exactly zero are
/// dropped; the identity term is always first.
pub fn ising_terms(problem: &TspProblem) -> Vec<PauliTerm> {
    ising_from_qubo(&qubo_matrix(problem))
}

pub fn ising_from_qubo(q: &QuboMatrix) -> Vec<PauliTerm> {
    let mut constant = q.offset();
    let mut single: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pair: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (a, b, v) in q.entries() {
        if a == b {
            // v x = v/2 − (v/2) Z
            constant += v / 2.0;
            *single.entry(a).or_insert(0.0) -= v / 2.0;
        } else {
            // v x_a x_b = v/4 (1 − Z_a − Z_b + Z_a Z_b)
            constant += v / 4.0;
            *single.entry(a).or_insert(0.0) -= v / 4.0;
            *single.entry(b).or_insert(0.0) -= v / 4.0;
            *pair.entry((a, b)).or_insert(0.0) += v / 4.0;
        }
    }
    let mut terms = Vec::with_capacity(1 + single.len() + pair.len());
    terms.push(PauliTerm { qubits: Vec::new(), coeff: constant });
    terms.extend(
        single
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(a, c)| PauliTerm { qubits: alloc::vec![a], coeff: c }),
    );
    terms.extend(
        pair.into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((a, b), c)| PauliTerm { qubits: alloc::vec![a, b], coeff: c }),
    );
    terms
}

/// Evaluates a term list on a spin assignment (`spins[q] = ±1`, with
/// bit 0 ↦ +1 and bit 1 ↦ −1).
pub fn evaluate_ising(terms: &[PauliTerm], spins: &[i8]) -> f64 {
    terms
        .iter()
        .map(|t| t.coeff * t.qubits.iter().map(|&q| spins[q] as f64).product::<f64>())
        .sum()
}

/// Spin image of a bitstring.
pub fn spins_of(x: &[bool]) -> Vec<i8> {
    x.iter().map(|&b| if b { -1 } else { 1 }).collect()
}

/// Non-identity term count and two-qubit term count of a term list.
pub fn term_counts(terms: &[PauliTerm]) -> (usize, usize) {
    let non_identity = terms.iter().filter(|t| !t.qubits.is_empty()).count();
    let zz = terms.iter().filter(|t| t.qubits.len() == 2).count();
    (non_identity, zz)
}
