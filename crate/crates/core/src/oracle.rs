//! Exact solvers: Held–Karp for cycles and paths, permutation enumeration as
//! an independent check, and the cost extremes of the penalized objective.
//!
//! Optimal tours are reported as the lexicographically smallest optimum
//! (ties within [`COST_TOL`](crate::COST_TOL), relative to the optimum).

use alloc::vec;
use alloc::vec::Vec;

use crate::problem::subspace_cost_table;
use crate::tour::route_cost_unchecked;
use crate::{CostMatrix, Error, Result, SequenceState, TspProblem, COST_TOL};

/// Largest `n` accepted by the dynamic program.
pub const HELD_KARP_MAX: usize = 20;
/// Largest `n` accepted by permutation enumeration.
pub const ENUMERATION_MAX: usize = 10;
/// Largest `n` accepted by the full `2^(n^2)` extremes scan.
pub const FULL_EXTREMES_MAX: usize = 5;

fn tol(best: f64) -> f64 {
    COST_TOL * best.abs().max(1.0)
}

enum Tail {
    Return(usize),
    End(usize),
    Free,
}

/// Cheapest way to start at `start` (or anywhere when `None`), visit every
/// city of `others` once, then apply `tail`.
fn held_karp(cost: &CostMatrix, start: Option<usize>, others: &[usize], tail: Tail) -> Vec<usize> {
    let m = others.len();
    let tail_cost = |c: usize| match tail {
        Tail::Return(s) | Tail::End(s) => cost.get(c, s),
        Tail::Free => 0.0,
    };
    let full = (1usize << m) - 1;
    // h[r * m + j]: cost to finish from others[j] with remaining set r.
    let mut h = vec![f64::INFINITY; (1usize << m) * m.max(1)];
    for j in 0..m {
        h[j] = tail_cost(others[j]);
    }
    for r in 1..=full {
        for j in 0..m {
            if r & (1 << j) != 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut bits = r;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let v = cost.get(others[j], others[k]) + h[(r & !(1 << k)) * m + k];
                if v < best {
                    best = v;
                }
            }
            h[r * m + j] = best;
        }
    }

    let step = |from: Option<usize>, k: usize, r: usize| -> f64 {
        let edge = from.map_or(0.0, |f| cost.get(f, others[k]));
        edge + h[(r & !(1 << k)) * m + k]
    };
    let mut path = Vec::with_capacity(m + 2);
    path.extend(start);
    if m == 0 {
        return path;
    }
    let mut cur = start;
    let mut r = full;
    while r != 0 {
        let best = (0..m).filter(|&k| r & (1 << k) != 0).map(|k| step(cur, k, r)).fold(f64::INFINITY, f64::min);
        // `others` is sorted, so the first admissible k is the smallest city.
        let k = (0..m)
            .filter(|&k| r & (1 << k) != 0)
            .find(|&k| step(cur, k, r) <= best + tol(best))
            .unwrap_or(0);
        path.push(others[k]);
        cur = Some(others[k]);
        r &= !(1 << k);
    }
    path
}

fn check_cap(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n > cap {
        return Err(Error::SizeCap { what, needed: n as u128, cap: cap as u128 });
    }
    Ok(())
}

/// Optimal tour by Held–Karp. Closed tours start at city 0.
pub fn exact_tsp(cost: &CostMatrix, closed: bool) -> Result<(f64, Vec<usize>)> {
    let n = cost.n();
    check_cap(n, HELD_KARP_MAX, "Held-Karp cities")?;
    let tour = if closed {
        let others: Vec<usize> = (1..n).collect();
        held_karp(cost, Some(0), &others, Tail::Return(0))
    } else {
        let all: Vec<usize> = (0..n).collect();
        held_karp(cost, None, &all, Tail::Free)
    };
    Ok((route_cost_unchecked(cost, &tour, closed), tour))
}

fn check_endpoints(n: usize, entry: usize, exit: usize) -> Result<()> {
    if entry >= n || exit >= n {
        return Err(Error::InvalidEndpoints(alloc::format!("endpoint out of range 0..{n}")));
    }
    if entry == exit {
        return Err(Error::InvalidEndpoints("entry equals exit".into()));
    }
    Ok(())
}

/// Optimal Hamiltonian path from `entry` to `exit`.
pub fn exact_path_tsp(cost: &CostMatrix, entry: usize, exit: usize) -> Result<(f64, Vec<usize>)> {
    let n = cost.n();
    check_endpoints(n, entry, exit)?;
    check_cap(n, HELD_KARP_MAX, "Held-Karp cities")?;
    let others: Vec<usize> = (0..n).filter(|&c| c != entry && c != exit).collect();
    let mut path = held_karp(cost, Some(entry), &others, Tail::End(exit));
    path.push(exit);
    Ok((route_cost_unchecked(cost, &path, false), path))
}

/// Next permutation in lexicographic order; `false` after the last one.
pub fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Scans `prefix + perm(middle) + suffix` over all orders of `middle`.
fn enumerate(cost: &CostMatrix, prefix: &[usize], middle: &[usize], suffix: &[usize], closed: bool) -> (f64, Vec<usize>) {
    let build = |mid: &[usize]| -> Vec<usize> { prefix.iter().chain(mid).chain(suffix).copied().collect() };
    let mut mid = middle.to_vec();
    mid.sort_unstable();
    let first = mid.clone();
    let mut best = f64::INFINITY;
    loop {
        best = best.min(route_cost_unchecked(cost, &build(&mid), closed));
        if !next_permutation(&mut mid) {
            break;
        }
    }
    let mut mid = first;
    loop {
        let t = build(&mid);
        let c = route_cost_unchecked(cost, &t, closed);
        if c <= best + tol(best) {
            return (c, t);
        }
        if !next_permutation(&mut mid) {
            return (best, t);
        }
    }
}

/// Optimal tour by trying every permutation. Closed tours start at city 0.
pub fn enumerate_tsp(cost: &CostMatrix, closed: bool) -> Result<(f64, Vec<usize>)> {
    let n = cost.n();
    check_cap(n, ENUMERATION_MAX, "enumeration cities")?;
    Ok(if closed {
        enumerate(cost, &[0], &(1..n).collect::<Vec<_>>(), &[], true)
    } else {
        enumerate(cost, &[], &(0..n).collect::<Vec<_>>(), &[], false)
    })
}

/// Optimal fixed-endpoint path by trying every interior order.
pub fn enumerate_path_tsp(cost: &CostMatrix, entry: usize, exit: usize) -> Result<(f64, Vec<usize>)> {
    let n = cost.n();
    check_endpoints(n, entry, exit)?;
    check_cap(n, ENUMERATION_MAX, "enumeration cities")?;
    let mid: Vec<usize> = (0..n).filter(|&c| c != entry && c != exit).collect();
    Ok(enumerate(cost, &[entry], &mid, &[exit], false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ExtremesMode {
    /// Every `n^2`-bit assignment, with the one-city-per-step penalty.
    Full,
    /// Every visiting sequence.
    Subspace,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Witness {
    Sequence(SequenceState),
    Bits(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Extremes {
    pub c_opt: f64,
    pub c_worst: f64,
    pub mode: ExtremesMode,
    pub opt_witness: Witness,
}

/// Minimum and maximum of the penalized objective.
pub fn extremes(problem: &TspProblem, mode: ExtremesMode) -> Result<Extremes> {
    match mode {
        ExtremesMode::Subspace => subspace_extremes(problem),
        ExtremesMode::Full => full_extremes(problem),
    }
}

fn subspace_extremes(problem: &TspProblem) -> Result<Extremes> {
    let owned;
    let costs = match problem.subspace_costs() {
        Some(c) => c,
        None => {
            owned = subspace_cost_table(problem)?;
            &owned[..]
        }
    };
    let (mut lo, mut hi, mut arg) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for (idx, &c) in costs.iter().enumerate() {
        if c < lo {
            lo = c;
            arg = idx;
        }
        hi = hi.max(c);
    }
    Ok(Extremes {
        c_opt: lo,
        c_worst: hi,
        mode: ExtremesMode::Subspace,
        opt_witness: Witness::Sequence(SequenceState::from_index(arg, problem.n())),
    })
}

struct FullScan {
    n: usize,
    pair: Vec<f64>,
    slot: Vec<f64>,
    lp: f64,
    counts: Vec<i64>,
    regs: Vec<usize>,
    lo: f64,
    hi: f64,
    arg: Vec<usize>,
}

impl FullScan {
    fn dfs(&mut self, t: usize, acc: f64) {
        let n = self.n;
        if t == n {
            let visit: i64 = self.counts.iter().map(|&c| (c - 1) * (c - 1)).sum();
            let total = acc + self.lp * visit as f64;
            if total < self.lo {
                self.lo = total;
                self.arg.clone_from(&self.regs);
            }
            if total > self.hi {
                self.hi = total;
            }
            return;
        }
        for a in 0..(1usize << n) {
            let mut add = self.slot[t * (1 << n) + a];
            if t > 0 {
                add += self.pair[self.regs[t - 1] * (1 << n) + a];
            }
            for i in 0..n {
                if a & (1 << i) != 0 {
                    self.counts[i] += 1;
                }
            }
            self.regs[t] = a;
            self.dfs(t + 1, acc + add);
            for i in 0..n {
                if a & (1 << i) != 0 {
                    self.counts[i] -= 1;
                }
            }
        }
    }
}

fn full_extremes(problem: &TspProblem) -> Result<Extremes> {
    let n = problem.n();
    check_cap(n, FULL_EXTREMES_MAX, "full extremes cities")?;
    let w = problem.effective();
    let l = problem.lambdas();
    let r = 1usize << n;
    let members = |a: usize| (0..n).filter(move |&i| a & (1 << i) != 0);
    let mut pair = vec![0.0; r * r];
    for a in 0..r {
        for b in 0..r {
            pair[a * r + b] = members(a).flat_map(|i| members(b).map(move |j| (i, j))).map(|(i, j)| w.get(i, j)).sum();
        }
    }
    // Per-register terms: time slots plus the one-city-per-step penalty.
    let mut slot = vec![0.0; n * r];
    for t in 0..n {
        for a in 0..r {
            let k = a.count_ones() as i64 - 1;
            let mut v = l.q * (k * k) as f64;
            if let Some(tm) = &problem.constraints().time {
                v += l.t * members(a).filter(|&i| tm[i * n + t]).count() as f64;
            }
            slot[t * r + a] = v;
        }
    }
    let mut scan = FullScan {
        n,
        pair,
        slot,
        lp: l.p,
        counts: vec![0; n],
        regs: vec![0; n],
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
        arg: vec![0; n],
    };
    scan.dfs(0, 0.0);
    let mut bits = vec![false; n * n];
    for (t, &a) in scan.arg.iter().enumerate() {
        for i in members(a) {
            bits[t * n + i] = true;
        }
    }
    Ok(Extremes { c_opt: scan.lo, c_worst: scan.hi, mode: ExtremesMode::Full, opt_witness: Witness::Bits(bits) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::bitstring_cost;

    fn m3() -> CostMatrix {
        CostMatrix::from_rows(&[vec![0., 1., 4.], vec![2., 0., 1.], vec![1., 3., 0.]]).unwrap()
    }

    #[test]
    fn closed_three_city() {
        assert_eq!(exact_tsp(&m3(), true).unwrap(), (3.0, vec![0, 1, 2]));
        assert_eq!(enumerate_tsp(&m3(), true).unwrap(), (3.0, vec![0, 1, 2]));
    }

    #[test]
    fn two_city() {
        let m = CostMatrix::from_rows(&[vec![0., 3.], vec![7., 0.]]).unwrap();
        assert_eq!(exact_tsp(&m, true).unwrap().0, 10.0);
        assert_eq!(exact_tsp(&m, false).unwrap(), (3.0, vec![0, 1]));
        assert_eq!(exact_path_tsp(&m, 1, 0).unwrap(), (7.0, vec![1, 0]));
    }

    #[test]
    fn path_three_city() {
        assert_eq!(exact_path_tsp(&m3(), 0, 2).unwrap(), (2.0, vec![0, 1, 2]));
        assert!(exact_path_tsp(&m3(), 1, 1).is_err());
        assert!(exact_path_tsp(&m3(), 0, 3).is_err());
    }

    #[test]
    fn lexicographic_tie_break() {
        let m = CostMatrix::from_fn(4, |_, _| 1.0).unwrap();
        assert_eq!(exact_tsp(&m, true).unwrap().1, vec![0, 1, 2, 3]);
        assert_eq!(exact_tsp(&m, false).unwrap().1, vec![0, 1, 2, 3]);
        assert_eq!(exact_path_tsp(&m, 2, 0).unwrap().1, vec![2, 1, 3, 0]);
        assert_eq!(enumerate_path_tsp(&m, 2, 0).unwrap().1, vec![2, 1, 3, 0]);
    }

    #[test]
    fn permutation_order() {
        let mut a = vec![0, 1, 2];
        let mut seen = vec![a.clone()];
        while next_permutation(&mut a) {
            seen.push(a.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
        assert_eq!(seen[5], vec![2, 1, 0]);
    }

    #[test]
    fn two_city_subspace_extremes() {
        let m = CostMatrix::from_rows(&[vec![0., 3.], vec![7., 0.]]).unwrap();
        let p = TspProblem::unconstrained(m).unwrap();
        let e = extremes(&p, ExtremesMode::Subspace).unwrap();
        assert_eq!((e.c_opt, e.c_worst), (3.0, 28.0));
        assert_eq!(e.opt_witness, Witness::Sequence(SequenceState::new(vec![0, 1])));
    }

    #[test]
    fn full_extremes_match_bitstring_scan() {
        let p = TspProblem::unconstrained(m3()).unwrap();
        let e = extremes(&p, ExtremesMode::Full).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..512usize {
            let x: Vec<bool> = (0..9).map(|q| (k >> q) & 1 == 1).collect();
            let c = bitstring_cost(&p, &x, true).unwrap();
            lo = lo.min(c);
            hi = hi.max(c);
        }
        assert!((e.c_opt - lo).abs() < 1e-9 && (e.c_worst - hi).abs() < 1e-9);
        let Witness::Bits(b) = &e.opt_witness else { panic!() };
        assert!((bitstring_cost(&p, b, true).unwrap() - e.c_opt).abs() < 1e-9);
        let s = extremes(&p, ExtremesMode::Subspace).unwrap();
        assert_eq!(s.c_opt, e.c_opt);
    }

    #[test]
    fn caps() {
        let big = CostMatrix::from_fn(21, |_, _| 1.0).unwrap();
        assert!(exact_tsp(&big, true).is_err());
        let m = CostMatrix::from_fn(11, |_, _| 1.0).unwrap();
        assert!(enumerate_tsp(&m, true).is_err());
        let p = TspProblem::unconstrained(CostMatrix::from_fn(6, |_, _| 1.0).unwrap()).unwrap();
        assert!(extremes(&p, ExtremesMode::Full).is_err());
    }
}
