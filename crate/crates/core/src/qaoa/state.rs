use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::math::{sin_cos, sqrt};
use crate::problem::{subspace_size, DEFAULT_TABLE_CAP};
use crate::{Error, Result, TspProblem};

/// Angles of a depth-`p` circuit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() || gammas.is_empty() {
            return Err(Error::InvalidArgument("need p >= 1 gammas and as many betas".into()));
        }
        if gammas.iter().chain(&betas).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        Ok(Self { gammas, betas })
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    /// `[γ_1..γ_p, β_1..β_p]`.
    pub fn flatten(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_flat(theta: &[f64]) -> Result<Self> {
        let p = theta.len() / 2;
        Self::new(theta[..p].to_vec(), theta[p..2 * p].to_vec())
    }
}

/// Amplitudes over visiting sequences, indexed by
/// [`crate::SequenceState::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceState {
    n: usize,
    amps: Vec<Complex64>,
}

impl SubspaceState {
    /// Tensor product of uniform one-hot superpositions on every register:
    /// all `n^n` amplitudes equal `n^(-n/2)`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::uniform_capped(n, DEFAULT_TABLE_CAP)
    }

    pub fn uniform_capped(n: usize, cap: u128) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("need at least 2 cities".into()));
        }
        let size = subspace_size(n).unwrap_or(u128::MAX);
        if size > cap || size > usize::MAX as u128 {
            return Err(Error::SizeCap { what: "subspace state", needed: size, cap });
        }
        let size = size as usize;
        let a = 1.0 / sqrt(size as f64);
        Ok(Self { n, amps: vec![Complex64::new(a, 0.0); size] })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let size = subspace_size(n).unwrap_or(u128::MAX);
        if amps.len() as u128 != size {
            return Err(Error::Dimension { what: "amplitudes", expected: size as usize, got: amps.len() });
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Multiplies amplitude `idx` by `exp(-i γ costs[idx])`.
    pub fn apply_phase(&mut self, costs: &[f64], gamma: f64) {
        debug_assert_eq!(costs.len(), self.amps.len());
        for (a, &c) in self.amps.iter_mut().zip(costs) {
            let (s, co) = sin_cos(gamma * c);
            *a *= Complex64::new(co, -s);
        }
    }

    pub fn apply_cost_phase(&mut self, problem: &TspProblem, gamma: f64) -> Result<()> {
        let costs = problem.subspace_costs().ok_or(Error::MissingSubspaceTable)?;
        self.apply_phase(costs, gamma);
        Ok(())
    }

    /// Applies `I − (1 − e^{−iβ}) |u⟩⟨u|` on every register, `|u⟩` being the
    /// register's uniform one-hot superposition: each amplitude loses
    /// `(1 − e^{−iβ})` times the mean of its slice along the register axis.
    pub fn apply_grover_mixer(&mut self, beta: f64) {
        let n = self.n;
        let len = self.amps.len();
        let (s, c) = sin_cos(beta);
        let factor = Complex64::new(1.0 - c, s);
        let inv_n = 1.0 / n as f64;
        let mut stride = 1usize;
        for _ in 0..n {
            let block = stride * n;
            let mut base = 0;
            while base < len {
                for off in 0..stride {
                    let start = base + off;
                    let mut mean = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        mean += self.amps[start + k * stride];
                    }
                    let shift = factor * (mean * inv_n);
                    for k in 0..n {
                        self.amps[start + k * stride] -= shift;
                    }
                }
                base += block;
            }
            stride = block;
        }
    }

    /// `Σ |a_idx|^2 · costs[idx]`.
    pub fn expectation_with(&self, costs: &[f64]) -> f64 {
        self.amps.iter().zip(costs).map(|(a, &c)| a.norm_sqr() * c).sum()
    }

    pub fn expectation(&self, problem: &TspProblem) -> Result<f64> {
        let costs = problem.subspace_costs().ok_or(Error::MissingSubspaceTable)?;
        Ok(self.expectation_with(costs))
    }

    /// Draws `shots` i.i.d. measurement outcomes; returns index → count.
    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<BTreeMap<usize, u64>> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        let dist = WeightedIndex::new(self.amps.iter().map(|a| a.norm_sqr()))
            .map_err(|e| Error::InvalidArgument(alloc::format!("cannot sample state: {e}")))?;
        let mut hist = BTreeMap::new();
        for _ in 0..shots {
            *hist.entry(dist.sample(rng)).or_insert(0) += 1;
        }
        Ok(hist)
    }
}

/// `init` followed by `p` (cost phase, mixer) layers.
pub fn evolve(problem: &TspProblem, params: &QaoaParams) -> Result<SubspaceState> {
    let mut state = SubspaceState::uniform_capped(problem.n(), problem.table_cap())?;
    evolve_from(&mut state, problem, params)?;
    Ok(state)
}

/// Applies the layers of `params` to an existing state.
pub fn evolve_from(state: &mut SubspaceState, problem: &TspProblem, params: &QaoaParams) -> Result<()> {
    let costs = problem.subspace_costs().ok_or(Error::MissingSubspaceTable)?;
    if state.n() != problem.n() {
        return Err(Error::Dimension { what: "state cities", expected: problem.n(), got: state.n() });
    }
    for (&g, &b) in params.gammas.iter().zip(&params.betas) {
        state.apply_phase(costs, g);
        state.apply_grover_mixer(b);
    }
    Ok(())
}
