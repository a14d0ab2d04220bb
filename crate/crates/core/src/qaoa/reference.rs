//! Gate-level statevector simulation on all `n^2` qubits, for `n <= 3`.
//!
//! Qubit `q = t * n + i` is basis bit `q` of the amplitude index. Each
//! register is prepared by a W-state ladder `U_s` (an `X` followed by
//! controlled-`RY` and `CNOT` pairs), and the mixer is
//! `U_s · diag(e^{-iβ} on |0..0⟩) · U_s†` on every register.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{QaoaParams, SubspaceState};
use crate::math::{sin_cos, sqrt};
use crate::problem::bitstring_cost;
use crate::{Error, Result, SequenceState, TspProblem};

/// Largest city count accepted by the reference simulator.
pub const MAX_REFERENCE_CITIES: usize = 3;

#[derive(Debug, Clone)]
pub struct FullState {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl FullState {
    pub fn zero(qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let qubits = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << qubits {
            return Err(Error::InvalidArgument("length must be a power of two".into()));
        }
        Ok(Self { qubits, amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn x(&mut self, q: usize) {
        let m = 1 << q;
        for k in 0..self.amps.len() {
            if k & m == 0 {
                self.amps.swap(k, k | m);
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1 << control, 1 << target);
        for k in 0..self.amps.len() {
            if k & c != 0 && k & t == 0 {
                self.amps.swap(k, k | t);
            }
        }
    }

    /// Controlled `RY(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`.
    pub fn cry(&mut self, control: usize, target: usize, theta: f64) {
        let (s, co) = sin_cos(theta / 2.0);
        let (c, t) = (1 << control, 1 << target);
        for k in 0..self.amps.len() {
            if k & c != 0 && k & t == 0 {
                let a0 = self.amps[k];
                let a1 = self.amps[k | t];
                self.amps[k] = a0 * co - a1 * s;
                self.amps[k | t] = a0 * s + a1 * co;
            }
        }
    }

    /// Multiplies by `e^{-iβ}` every amplitude whose qubits `qs` are all 0.
    pub fn phase_on_zero(&mut self, qs: &[usize], beta: f64) {
        let mask: usize = qs.iter().map(|&q| 1usize << q).sum();
        let (s, c) = sin_cos(beta);
        let ph = Complex64::new(c, -s);
        for (k, a) in self.amps.iter_mut().enumerate() {
            if k & mask == 0 {
                *a *= ph;
            }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bits_of(&self, k: usize) -> Vec<bool> {
        (0..self.qubits).map(|q| (k >> q) & 1 == 1).collect()
    }
}

/// Angles of the ladder on an `n`-qubit register: `cos(θ_k / 2) = √(1/(n−k))`.
fn ladder_angles(n: usize) -> Vec<f64> {
    (0..n - 1).map(|k| 2.0 * libm::acos(sqrt(1.0 / (n - k) as f64))).collect()
}

fn apply_us(state: &mut FullState, qs: &[usize]) {
    state.x(qs[0]);
    for (k, th) in ladder_angles(qs.len()).into_iter().enumerate() {
        state.cry(qs[k], qs[k + 1], th);
        state.cnot(qs[k + 1], qs[k]);
    }
}

fn apply_us_dagger(state: &mut FullState, qs: &[usize]) {
    let th = ladder_angles(qs.len());
    for k in (0..qs.len() - 1).rev() {
        state.cnot(qs[k + 1], qs[k]);
        state.cry(qs[k], qs[k + 1], -th[k]);
    }
    state.x(qs[0]);
}

fn register(n: usize, t: usize) -> Vec<usize> {
    (0..n).map(|i| t * n + i).collect()
}

/// `U_s` on every register of `|0…0⟩`.
pub fn initial_full_state(n: usize) -> Result<FullState> {
    check(n)?;
    let mut s = FullState::zero(n * n);
    for t in 0..n {
        apply_us(&mut s, &register(n, t));
    }
    Ok(s)
}

/// The mixer circuit with angle `beta` on every register.
pub fn apply_full_mixer(state: &mut FullState, n: usize, beta: f64) {
    for t in 0..n {
        let qs = register(n, t);
        apply_us_dagger(state, &qs);
        state.phase_on_zero(&qs, beta);
        apply_us(state, &qs);
    }
}

/// Diagonal phase `exp(−iγ C(x))` with `C` the one-hot bitstring cost (visit
/// penalty only, no per-step penalty).
pub fn apply_full_cost_phase(state: &mut FullState, problem: &TspProblem, gamma: f64) -> Result<()> {
    for k in 0..state.amps.len() {
        let c = bitstring_cost(problem, &state.bits_of(k), false)?;
        let (s, co) = sin_cos(gamma * c);
        state.amps[k] *= Complex64::new(co, -s);
    }
    Ok(())
}

/// Runs the full circuit and returns all `2^(n^2)` amplitudes.
pub fn full_space_reference(problem: &TspProblem, params: &QaoaParams) -> Result<Vec<Complex64>> {
    let n = problem.n();
    let mut s = initial_full_state(n)?;
    for (&g, &b) in params.gammas.iter().zip(&params.betas) {
        apply_full_cost_phase(&mut s, problem, g)?;
        apply_full_mixer(&mut s, n, b);
    }
    Ok(s.into_amplitudes())
}

/// Basis index in the full space of the one-hot image of a sequence.
pub fn full_index(seq: &SequenceState) -> usize {
    seq.to_bits().iter().enumerate().filter(|(_, &b)| b).map(|(q, _)| 1usize << q).sum()
}

/// Places subspace amplitudes on their one-hot bitstrings, zero elsewhere.
pub fn embed(state: &SubspaceState) -> Result<Vec<Complex64>> {
    let n = state.n();
    check(n)?;
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << (n * n)];
    for (idx, &a) in state.amplitudes().iter().enumerate() {
        out[full_index(&SequenceState::from_index(idx, n))] = a;
    }
    Ok(out)
}

/// Reads the one-city-per-step slice out of a full-space vector.
pub fn restrict(full: &[Complex64], n: usize) -> Result<SubspaceState> {
    check(n)?;
    let size = n.pow(n as u32);
    let amps = (0..size).map(|idx| full[full_index(&SequenceState::from_index(idx, n))]).collect();
    SubspaceState::from_amplitudes(n, amps)
}

/// Whether basis index `k` has exactly one set bit per register.
pub fn in_slice(k: usize, n: usize) -> bool {
    (0..n).all(|t| ((k >> (t * n)) & ((1 << n) - 1)).count_ones() == 1)
}

fn check(n: usize) -> Result<()> {
    if !(2..=MAX_REFERENCE_CITIES).contains(&n) {
        return Err(Error::SizeCap { what: "reference simulator cities", needed: n as u128, cap: MAX_REFERENCE_CITIES as u128 });
    }
    Ok(())
}
