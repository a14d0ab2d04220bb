use alloc::vec;
use alloc::vec::Vec;

use super::ahc::{agglomerate, medoid, meta_matrix, Linkage};
use crate::clock::{Clock, NoClock};
use crate::math::ceil;
use crate::oracle::{exact_path_tsp, exact_tsp};
use crate::qaoa::{run_qaoa, QaoaConfig};
use crate::rng::stable_hash;
use crate::tour::route_cost_unchecked;
use crate::{ConstraintSet, CostMatrix, Error, Result, TspProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Backend {
    Qaoa,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClqConfig {
    /// Largest sub-problem handed to the backend.
    pub n_max: usize,
    pub backend: Backend,
    /// Settings for QAOA sub-problems; each call gets its own derived seed.
    pub qaoa: QaoaConfig,
    pub linkage: Linkage,
    pub seed: u64,
}

impl ClqConfig {
    pub fn exact(n_max: usize) -> Self {
        Self { n_max, backend: Backend::Exact, qaoa: QaoaConfig::new(1, 100), linkage: Linkage::Average, seed: 0 }
    }

    pub fn qaoa(n_max: usize, qaoa: QaoaConfig) -> Self {
        Self { n_max, backend: Backend::Qaoa, qaoa, linkage: Linkage::Average, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterNode {
    pub members: Vec<usize>,
    pub medoid: usize,
    pub entry: usize,
    pub exit: usize,
    #[cfg_attr(feature = "serde", serde(rename = "path"))]
    pub solved_path: Vec<usize>,
    pub children: Vec<ClusterNode>,
}

impl ClusterNode {
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ClusterNode::depth).max().unwrap_or(0)
    }

    /// Nodes without children.
    pub fn leaves(&self) -> Vec<&ClusterNode> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(ClusterNode::leaves).collect()
    }
}

/// Seconds spent clustering, on meta-tours, and on leaf sub-problems.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageTimes {
    pub clustering: f64,
    pub meta: f64,
    pub leaves: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClqResult {
    pub tour: Vec<usize>,
    /// Closed tour cost on the input matrix.
    pub cost: f64,
    /// Backend invocations on sub-problems of at least 2 cities.
    pub qaoa_calls: usize,
    pub tree: ClusterNode,
    pub wall: StageTimes,
}

/// A backend error together with whatever part of the tree was built.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct ClqFailure {
    #[source]
    pub error: Error,
    pub partial: Option<ClusterNode>,
}

/// Time-slot constraints forcing `entry` at the first step and `exit` at the
/// last step of an `m`-city path.
pub fn pin_endpoints(m: usize, entry: usize, exit: usize) -> Result<ConstraintSet> {
    if entry >= m || exit >= m || (m > 1 && entry == exit) {
        return Err(Error::InvalidEndpoints(alloc::format!("entry {entry}, exit {exit} for {m} cities")));
    }
    let mut t = vec![false; m * m];
    if m > 1 {
        for i in 0..m {
            for s in 0..m {
                let first_bad = (s == 0 && i != entry) || (i == entry && s != 0);
                let last_bad = (s == m - 1 && i != exit) || (i == exit && s != m - 1);
                t[i * m + s] = first_bad || last_bad;
            }
        }
    }
    Ok(ConstraintSet::none().with_time(t))
}

/// Turns a sampled sequence into a permutation of `0..n`: first occurrences
/// are kept, missing cities appended in increasing order, and `ends` (if any)
/// moved to the front and back.
pub fn repair_path(seq: &[usize], n: usize, ends: Option<(usize, usize)>) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for &c in seq {
        if c < n && !seen[c] {
            seen[c] = true;
            out.push(c);
        }
    }
    out.extend((0..n).filter(|&c| !seen[c]));
    if let Some((entry, exit)) = ends {
        out.retain(|&c| c != entry && c != exit);
        out.insert(0, entry);
        if exit != entry {
            out.push(exit);
        }
    }
    out
}

fn argmin_pair(cost: &CostMatrix, a: &[usize], b: &[usize], skip_u: Option<usize>, skip_v: Option<usize>) -> (usize, usize) {
    let mut best: Option<(f64, usize, usize)> = None;
    for &u in a.iter().filter(|&&u| Some(u) != skip_u) {
        for &v in b.iter().filter(|&&v| Some(v) != skip_v) {
            let c = cost.get(u, v);
            if best.map_or(true, |(bc, bu, bv)| c < bc || (c == bc && (u, v) < (bu, bv))) {
                best = Some((c, u, v));
            }
        }
    }
    best.map_or((a[0], b[0]), |(_, u, v)| (u, v))
}

/// Greedy transitions between consecutive clusters. Pair `c` is the cheapest
/// edge from cluster `c` to cluster `c + 1`, avoiding the cluster's entry as
/// its exit and an already fixed exit as the next entry, whenever the
/// cluster has another member. Returns `(entry, exit)` per cluster.
fn select_endpoints(
    ordered: &[Vec<usize>],
    cost: &CostMatrix,
    closed: bool,
    fixed: Option<(usize, usize)>,
) -> Vec<(usize, usize)> {
    let k = ordered.len();
    let mut entries: Vec<Option<usize>> = vec![None; k];
    let mut exits: Vec<Option<usize>> = vec![None; k];
    if let Some((e, x)) = fixed {
        entries[0] = Some(e);
        exits[k - 1] = Some(x);
    }
    let pairs = if closed { k } else { k - 1 };
    for c in 0..pairs {
        let b = (c + 1) % k;
        let skip_u = entries[c].filter(|_| ordered[c].len() > 1);
        let skip_v = exits[b].filter(|_| ordered[b].len() > 1);
        let (u, v) = argmin_pair(cost, &ordered[c], &ordered[b], skip_u, skip_v);
        exits[c] = Some(u);
        entries[b] = Some(v);
    }
    (0..k)
        .map(|c| {
            let only = ordered[c][0];
            (entries[c].unwrap_or(only), exits[c].unwrap_or(only))
        })
        .collect()
}

/// `(exit of cluster c, entry of cluster c + 1)` around the cyclic order.
pub fn entry_exit(ordered: &[Vec<usize>], cost: &CostMatrix) -> Vec<(usize, usize)> {
    let ends = select_endpoints(ordered, cost, true, None);
    let k = ordered.len();
    (0..k).map(|c| (ends[c].1, ends[(c + 1) % k].0)).collect()
}

fn cluster_count(m: usize, n_max: usize) -> usize {
    (ceil(m as f64 / n_max as f64) as usize).clamp(2, n_max)
}

#[derive(Clone, Copy)]
enum Stage {
    Meta,
    Leaf,
}

struct Solver<'a> {
    cost: &'a CostMatrix,
    cfg: &'a ClqConfig,
    clock: &'a dyn Clock,
    calls: usize,
    times: StageTimes,
}

type Partial = (Error, ClusterNode);

impl Solver<'_> {
    fn charge(&mut self, stage: Stage, since: f64) {
        let dt = self.clock.now() - since;
        match stage {
            Stage::Meta => self.times.meta += dt,
            Stage::Leaf => self.times.leaves += dt,
        }
    }

    fn qaoa_config(&self) -> QaoaConfig {
        let mut q = self.cfg.qaoa.clone();
        q.seed = stable_hash(self.cfg.seed, &[self.calls as u64]);
        q
    }

    /// Closed tour over `sub`, as local indices.
    fn closed(&mut self, sub: &CostMatrix, stage: Stage) -> Result<Vec<usize>> {
        let t = self.clock.now();
        self.calls += 1;
        let out = match self.cfg.backend {
            Backend::Exact => exact_tsp(sub, true).map(|r| r.1),
            Backend::Qaoa => {
                let problem = TspProblem::unconstrained(sub.clone())?;
                run_qaoa(&problem, &self.qaoa_config()).map(|r| repair_path(&r.best_sequence.seq, sub.n(), None))
            }
        };
        self.charge(stage, t);
        out
    }

    /// Path over `sub` from `entry` to `exit`, as local indices.
    fn path(&mut self, sub: &CostMatrix, entry: usize, exit: usize, stage: Stage) -> Result<Vec<usize>> {
        let t = self.clock.now();
        self.calls += 1;
        let out = match self.cfg.backend {
            Backend::Exact => exact_path_tsp(sub, entry, exit).map(|r| r.1),
            Backend::Qaoa => {
                let problem = TspProblem::new(sub.clone(), pin_endpoints(sub.n(), entry, exit)?)?;
                run_qaoa(&problem, &self.qaoa_config())
                    .map(|r| repair_path(&r.best_sequence.seq, sub.n(), Some((entry, exit))))
            }
        };
        self.charge(stage, t);
        out
    }

    fn group(&mut self, cities: &[usize], k: usize) -> Vec<Vec<usize>> {
        let t = self.clock.now();
        let g = agglomerate(self.cost, cities, k, self.cfg.linkage);
        self.times.clustering += self.clock.now() - t;
        g
    }

    fn node(&self, members: &[usize], entry: usize, exit: usize) -> ClusterNode {
        let mut m = members.to_vec();
        m.sort_unstable();
        let med = medoid(&m, self.cost).unwrap_or(entry);
        ClusterNode { members: m, medoid: med, entry, exit, solved_path: Vec::new(), children: Vec::new() }
    }

    fn solve_children(
        &mut self,
        node: &mut ClusterNode,
        ordered: &[Vec<usize>],
        ends: &[(usize, usize)],
    ) -> core::result::Result<(), Error> {
        for (members, &(e, x)) in ordered.iter().zip(ends) {
            match self.solve_path(members, e, x) {
                Ok(child) => {
                    node.solved_path.extend_from_slice(&child.solved_path);
                    node.children.push(child);
                }
                Err((err, child)) => {
                    node.children.push(child);
                    return Err(err);
                }
            }
        }
        Ok(())
    }

    fn solve_top(&mut self) -> core::result::Result<ClusterNode, Partial> {
        let n = self.cost.n();
        let all: Vec<usize> = (0..n).collect();
        let mut root = self.node(&all, 0, 0);
        if n <= self.cfg.n_max {
            let tour = self.closed(self.cost, Stage::Leaf).map_err(|e| (e, root.clone()))?;
            root.entry = tour[0];
            root.exit = tour[n - 1];
            root.solved_path = tour;
            return Ok(root);
        }
        let groups = self.group(&all, cluster_count(n, self.cfg.n_max));
        let meta = meta_matrix(&groups, self.cost).map_err(|e| (e, root.clone()))?;
        let order = self.closed(&meta, Stage::Meta).map_err(|e| (e, root.clone()))?;
        let ordered: Vec<Vec<usize>> = order.iter().map(|&g| groups[g].clone()).collect();
        let ends = select_endpoints(&ordered, self.cost, true, None);
        if let Err(e) = self.solve_children(&mut root, &ordered, &ends) {
            return Err((e, root));
        }
        root.entry = root.solved_path[0];
        root.exit = root.solved_path[n - 1];
        Ok(root)
    }

    fn solve_path(&mut self, members: &[usize], entry: usize, exit: usize) -> core::result::Result<ClusterNode, Partial> {
        let mut node = self.node(members, entry, exit);
        let m = members.len();
        if m == 1 {
            node.solved_path = vec![entry];
            return Ok(node);
        }
        let local = |c: usize| node.members.iter().position(|&x| x == c).unwrap_or(0);
        if m <= self.cfg.n_max {
            let sub = self.cost.submatrix(&node.members).map_err(|e| (e, node.clone()))?;
            let (le, lx) = (local(entry), local(exit));
            let path = self.path(&sub, le, lx, Stage::Leaf).map_err(|e| (e, node.clone()))?;
            node.solved_path = path.iter().map(|&i| node.members[i]).collect();
            return Ok(node);
        }
        let k = cluster_count(m, self.cfg.n_max);
        let mut groups = self.group(&node.members, k);
        let find = |gs: &[Vec<usize>], c: usize| gs.iter().position(|g| g.contains(&c)).unwrap_or(0);
        if find(&groups, entry) == find(&groups, exit) {
            let rest: Vec<usize> = node.members.iter().copied().filter(|&c| c != exit).collect();
            groups = self.group(&rest, k - 1);
            groups.push(vec![exit]);
            groups.sort();
        }
        let (ga, gb) = (find(&groups, entry), find(&groups, exit));
        let meta = meta_matrix(&groups, self.cost).map_err(|e| (e, node.clone()))?;
        let order = self.path(&meta, ga, gb, Stage::Meta).map_err(|e| (e, node.clone()))?;
        let ordered: Vec<Vec<usize>> = order.iter().map(|&g| groups[g].clone()).collect();
        let ends = select_endpoints(&ordered, self.cost, false, Some((entry, exit)));
        if let Err(e) = self.solve_children(&mut node, &ordered, &ends) {
            return Err((e, node));
        }
        Ok(node)
    }
}

pub fn cl_qaoa_solve(cost: &CostMatrix, config: &ClqConfig) -> core::result::Result<ClqResult, ClqFailure> {
    cl_qaoa_solve_with_clock(cost, config, &NoClock)
}

/// Solves a closed tour by recursive decomposition.
///
/// Instances of at most `n_max` cities go to the backend directly.
/// Otherwise the cities are split into `clamp(ceil(n / n_max), 2, n_max)`
/// clusters, their medoids are toured, and every cluster is solved as a path
/// between greedily chosen entry and exit cities. A cluster whose entry and
/// exit fall into the same sub-cluster is re-split with the exit on its own.
pub fn cl_qaoa_solve_with_clock(
    cost: &CostMatrix,
    config: &ClqConfig,
    clock: &dyn Clock,
) -> core::result::Result<ClqResult, ClqFailure> {
    if config.n_max < 2 {
        return Err(ClqFailure { error: Error::InvalidArgument("n_max must be >= 2".into()), partial: None });
    }
    let mut solver = Solver { cost, cfg: config, clock, calls: 0, times: StageTimes::default() };
    match solver.solve_top() {
        Ok(tree) => {
            let tour = tree.solved_path.clone();
            if !crate::tour::is_permutation(&tour, cost.n()) {
                return Err(ClqFailure { error: Error::NotPermutation(cost.n()), partial: Some(tree) });
            }
            Ok(ClqResult {
                cost: route_cost_unchecked(cost, &tour, true),
                tour,
                qaoa_calls: solver.calls,
                tree,
                wall: solver.times,
            })
        }
        Err((error, partial)) => Err(ClqFailure { error, partial: Some(partial) }),
    }
}
