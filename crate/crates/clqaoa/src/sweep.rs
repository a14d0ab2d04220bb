//! Experiment sweeps: a TOML description expanded into seeded runs.
//!
//! ```toml
//! dataset = "synthetic"
//! n = [3, 4]
//! constraints = ["none", "bnc", "road", "time"]
//! axis = "shots"          # shots | depth | nmax | size
//! values = [10, 100, 500]
//! runs = 5
//! seed = 1
//! ```
//!
//! `shots` and `depth` sweep single QAOA runs; `nmax` and `size` sweep the
//! clustered solver, `size` taking `n` from `values`. Every instance is keyed
//! by `(n, constraint, run)` and is shared across the axis values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clqaoa_core::clock::Clock;
use clqaoa_core::cluster::{cl_qaoa_solve_with_clock, Backend, ClqConfig, ClusterNode, Linkage};
use clqaoa_core::heuristics::{ant_colony, AcoConfig};
use clqaoa_core::instances::{gen_constraints, gen_synthetic, random_permutation, sample_top_subset, ConstraintKind};
use clqaoa_core::metrics::{approximation_ratios, relative_ratio};
use clqaoa_core::oracle::{extremes, Extremes, ExtremesMode, FULL_EXTREMES_MAX};
use clqaoa_core::qaoa::{run_qaoa_with_clock, ObjectiveMode, QaoaConfig};
use clqaoa_core::rng::{rng_from_seed, stable_hash};
use clqaoa_core::{ConstraintSet, CostMatrix, TspProblem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clock::SystemClock;
use crate::error::{Error, Result};
use crate::formats::read_matrix;
use crate::graph::{graph_to_matrix, RankedNodes, WeightedDigraph};
use crate::records::Record;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremesChoice {
    /// Full space up to five cities, subspace above.
    #[default]
    Auto,
    Full,
    Subspace,
}

impl ExtremesChoice {
    pub fn resolve(self, n: usize) -> ExtremesMode {
        match self {
            Self::Full => ExtremesMode::Full,
            Self::Subspace => ExtremesMode::Subspace,
            Self::Auto if n <= FULL_EXTREMES_MAX => ExtremesMode::Full,
            Self::Auto => ExtremesMode::Subspace,
        }
    }
}

impl FromStr for ExtremesChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "full" => Ok(Self::Full),
            "subspace" => Ok(Self::Subspace),
            _ => Err(format!("unknown extremes mode {s:?} (auto, full, subspace)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dataset {
    Synthetic,
    MatrixFile,
    GraphFile,
}

impl Dataset {
    fn name(self) -> &'static str {
        match self {
            Self::Synthetic => "synthetic",
            Self::MatrixFile => "matrix-file",
            Self::GraphFile => "graph-file",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Shots,
    Depth,
    Nmax,
    Size,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Shots => "shots",
            Self::Depth => "depth",
            Self::Nmax => "nmax",
            Self::Size => "size",
        }
    }

    fn clustered(self) -> bool {
        matches!(self, Self::Nmax | Self::Size)
    }
}

fn default_dataset() -> Dataset {
    Dataset::Synthetic
}
fn default_constraints() -> Vec<ConstraintKind> {
    vec![ConstraintKind::None]
}
fn default_runs() -> usize {
    5
}
fn default_backend() -> Backend {
    Backend::Exact
}
fn default_p() -> usize {
    1
}
fn default_shots() -> usize {
    500
}
fn default_iters() -> usize {
    200
}
fn default_objective() -> ObjectiveMode {
    ObjectiveMode::Sampled
}
fn default_n_max() -> usize {
    5
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_dataset")]
    pub dataset: Dataset,
    /// City counts; ignored for `size`. Empty with a matrix file means the
    /// whole matrix.
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default = "default_constraints")]
    pub constraints: Vec<ConstraintKind>,
    pub axis: Axis,
    pub values: Vec<f64>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_backend")]
    pub backend: Backend,
    #[serde(default)]
    pub extremes_mode: ExtremesChoice,
    /// Depth when it is not the axis.
    #[serde(default = "default_p")]
    pub p: usize,
    /// Shots per evaluation when it is not the axis.
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default)]
    pub final_shots: Option<usize>,
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default = "default_objective")]
    pub objective: ObjectiveMode,
    /// Sub-problem cap when it is not the axis.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub linkage: Linkage,
    /// Run the ant colony on every clustered instance for `relative_ratio`.
    #[serde(default = "default_true")]
    pub compare_aco: bool,
    #[serde(default)]
    pub matrix: Option<PathBuf>,
    #[serde(default)]
    pub graph: Option<PathBuf>,
    #[serde(default)]
    pub ranks: Option<PathBuf>,
}

impl SweepSpec {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((0, 0));
            Error::Parse { path: path.into(), line, column, msg: e.message().to_owned() }
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&crate::formats::read_text(path)?, path)
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() || self.runs == 0 {
            return Err(Error::Spec("need at least one axis value and one run".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !(v.fract() == 0.0 && **v >= 1.0)) {
            return Err(Error::Spec(format!("axis value {v} is not a positive integer")));
        }
        if self.axis != Axis::Size && self.n.is_empty() && self.dataset != Dataset::MatrixFile {
            return Err(Error::Spec("`n` is empty".into()));
        }
        if self.axis.clustered() && self.constraints.iter().any(|&k| k != ConstraintKind::None) {
            return Err(Error::Spec("clustered sweeps take unconstrained instances only".into()));
        }
        let needs = |field: &Option<PathBuf>, name: &str| {
            field.is_none().then(|| Error::Spec(format!("dataset {} needs `{name}`", self.dataset.name())))
        };
        let missing = match self.dataset {
            Dataset::Synthetic => None,
            Dataset::MatrixFile => needs(&self.matrix, "matrix"),
            Dataset::GraphFile => needs(&self.graph, "graph").or_else(|| needs(&self.ranks, "ranks")),
        };
        missing.map_or(Ok(()), Err)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

enum Source {
    Synthetic,
    Matrix(CostMatrix),
    Graph(WeightedDigraph, RankedNodes),
}

/// Loads any dataset files, resolving relative paths against `base`.
fn load_source(spec: &SweepSpec, base: &Path) -> Result<Source> {
    let resolve = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
    Ok(match spec.dataset {
        Dataset::Synthetic => Source::Synthetic,
        Dataset::MatrixFile => Source::Matrix(read_matrix(&resolve(spec.matrix.as_ref().expect("validated")))?),
        Dataset::GraphFile => Source::Graph(
            WeightedDigraph::read(&resolve(spec.graph.as_ref().expect("validated")))?,
            RankedNodes::read(&resolve(spec.ranks.as_ref().expect("validated")))?,
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct InstanceKey {
    n: usize,
    kind: ConstraintKind,
    run: usize,
}

impl InstanceKey {
    fn hash(&self, seed: u64, extra: &[u64]) -> u64 {
        let mut keys = vec![self.n as u64, self.kind as u64, self.run as u64];
        keys.extend_from_slice(extra);
        stable_hash(seed, &keys)
    }

    fn problem_id(&self, dataset: Dataset) -> String {
        format!("{}-n{}-{}-r{}", dataset.name(), self.n, self.kind.name(), self.run)
    }
}

struct Instance {
    cost: CostMatrix,
    constraints: ConstraintSet,
    extremes: Option<std::result::Result<Extremes, String>>,
    aco: Option<std::result::Result<f64, String>>,
}

fn build_matrix(source: &Source, key: &InstanceKey, rng: &mut clqaoa_core::rng::Rng) -> Result<CostMatrix> {
    Ok(match source {
        Source::Synthetic => gen_synthetic(key.n, rng)?,
        Source::Matrix(m) if key.n == m.n() => m.clone(),
        Source::Matrix(m) => {
            if key.n > m.n() {
                return Err(Error::Spec(format!("n = {} exceeds the {}-city matrix", key.n, m.n())));
            }
            let mut cities = random_permutation(m.n(), rng);
            cities.truncate(key.n);
            cities.sort_unstable();
            m.submatrix(&cities)?
        }
        Source::Graph(g, ranked) => graph_to_matrix(g, &sample_top_subset(ranked.as_slice(), key.n, rng)?)?,
    })
}

fn build_instance(spec: &SweepSpec, source: &Source, key: &InstanceKey) -> Result<Instance> {
    let mut rng = rng_from_seed(key.hash(spec.seed, &[]));
    let cost = build_matrix(source, key, &mut rng)?;
    let constraints = gen_constraints(key.kind, key.n, &mut rng)?;
    let (extremes, aco) = if spec.axis.clustered() {
        let aco = spec.compare_aco.then(|| {
            let cfg = AcoConfig::default().with_seed(key.hash(spec.seed, &[2]));
            ant_colony(&cost, &cfg).map(|t| t.cost).map_err(|e| e.to_string())
        });
        (None, aco)
    } else {
        let mode = spec.extremes_mode.resolve(key.n);
        let ex = TspProblem::new(cost.clone(), constraints.clone())
            .and_then(|p| extremes(&p, mode))
            .map_err(|e| e.to_string());
        (Some(ex), None)
    };
    Ok(Instance { cost, constraints, extremes, aco })
}

struct Job {
    cell: usize,
    run: usize,
    key: InstanceKey,
    value: f64,
}

/// Cells in `(n, constraint, value)` order, runs innermost.
fn jobs(spec: &SweepSpec, source: &Source) -> Vec<Job> {
    let ns: Vec<usize> = match (spec.axis, source) {
        (Axis::Size, _) => vec![0],
        (_, Source::Matrix(m)) if spec.n.is_empty() => vec![m.n()],
        _ => spec.n.clone(),
    };
    let mut out = Vec::new();
    let mut cell = 0;
    for &n in &ns {
        for &kind in &spec.constraints {
            for &value in &spec.values {
                let n = if spec.axis == Axis::Size { value as usize } else { n };
                for run in 0..spec.runs {
                    out.push(Job { cell, run, key: InstanceKey { n, kind, run }, value });
                }
                cell += 1;
            }
        }
    }
    out
}

pub fn qaoa_config(spec: &SweepSpec, p: usize, shots: usize, seed: u64) -> QaoaConfig {
    let mut cfg = QaoaConfig::new(p, shots)
        .with_seed(seed)
        .with_objective(spec.objective)
        .with_max_iters(spec.max_iters);
    if let Some(s) = spec.final_shots {
        cfg = cfg.with_final_shots(s);
    }
    cfg
}

/// One QAOA run on `problem`, with ratios when `extremes` is given.
pub fn qaoa_record(
    problem: &TspProblem,
    config: &QaoaConfig,
    extremes: Option<&Extremes>,
    mut base: Record,
    clock: &dyn Clock,
) -> Result<Record> {
    let run = run_qaoa_with_clock(problem, config, clock)?;
    base.apply_qaoa(&run, config.shots, config.final_shots);
    if let Some(ex) = extremes {
        base.apply_ratios(&approximation_ratios(run.final_expectation, run.best_cost, ex));
    }
    Ok(base)
}

/// One clustered solve and its cluster tree; `aco_cost` fills in
/// `relative_ratio`.
pub fn cluster_record(
    cost: &CostMatrix,
    config: &ClqConfig,
    aco_cost: Option<f64>,
    mut base: Record,
    clock: &dyn Clock,
) -> Result<(Record, ClusterNode)> {
    let t0 = clock.now();
    let res = cl_qaoa_solve_with_clock(cost, config, clock).map_err(|f| f.error)?;
    let total = clock.now() - t0;
    base.method = "clqaoa".into();
    base.n_max = Some(config.n_max);
    base.backend = Some(backend_name(config.backend).into());
    base.best_cost = Some(res.cost);
    base.tour = Some(res.tour);
    base.qaoa_calls = Some(res.qaoa_calls);
    if let Some(c) = aco_cost {
        base.aco_cost = Some(c);
        base.relative_ratio = Some(relative_ratio(res.cost, c)?);
    }
    base.wall_ms = BTreeMap::from([
        ("clustering".into(), 1e3 * res.wall.clustering),
        ("meta".into(), 1e3 * res.wall.meta),
        ("leaves".into(), 1e3 * res.wall.leaves),
        ("total".into(), 1e3 * total),
    ]);
    Ok((base, res.tree))
}

pub fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Exact => "exact",
        Backend::Qaoa => "qaoa",
    }
}

fn run_job(spec: &SweepSpec, job: &Job, inst: &Result<Instance>) -> Record {
    let method = if spec.axis.clustered() { "clqaoa" } else { "qaoa" };
    let seed = job.key.hash(spec.seed, &[1, job.value.to_bits()]);
    let mut base = Record {
        cell: Some(job.cell),
        run: Some(job.run),
        axis: Some(spec.axis.name().into()),
        axis_value: Some(job.value),
        method: method.into(),
        problem_id: job.key.problem_id(spec.dataset),
        n: job.key.n,
        constraint: Some(job.key.kind.name().into()),
        seed,
        ..Record::default()
    };
    let result = inst.as_ref().map_err(|e| e.to_string()).and_then(|inst| {
        execute(spec, job, inst, seed, base.clone()).map_err(|e| e.to_string())
    });
    match result {
        Ok(r) => r,
        Err(e) => {
            base.error = Some(e);
            base
        }
    }
}

fn execute(spec: &SweepSpec, job: &Job, inst: &Instance, seed: u64, base: Record) -> Result<Record> {
    let clock = SystemClock::new();
    let v = job.value as usize;
    if spec.axis.clustered() {
        let n_max = if spec.axis == Axis::Nmax { v } else { spec.n_max };
        let qaoa = qaoa_config(spec, spec.p, spec.shots, 0);
        let config = ClqConfig { n_max, backend: spec.backend, qaoa, linkage: spec.linkage, seed };
        let aco = match &inst.aco {
            Some(Ok(c)) => Some(*c),
            Some(Err(e)) => return Err(Error::Spec(format!("ant colony reference failed: {e}"))),
            None => None,
        };
        return cluster_record(&inst.cost, &config, aco, base, &clock).map(|(r, _)| r);
    }
    let (p, shots) = match spec.axis {
        Axis::Shots => (spec.p, v),
        _ => (v, spec.shots),
    };
    let problem = TspProblem::new(inst.cost.clone(), inst.constraints.clone())?;
    let ex = match &inst.extremes {
        Some(Ok(ex)) => Some(ex),
        Some(Err(e)) => return Err(Error::Spec(format!("extremes failed: {e}"))),
        None => None,
    };
    qaoa_record(&problem, &qaoa_config(spec, p, shots, seed), ex, base, &clock)
}

/// Runs every cell. Records come back in `(cell, run)` order whatever the
/// scheduling; failed runs carry `error` and do not stop the sweep. `base`
/// resolves relative dataset paths.
pub fn run_sweep(spec: &SweepSpec, base: &Path, threads: Option<usize>) -> Result<Vec<Record>> {
    spec.validate()?;
    let source = load_source(spec, base)?;
    let jobs = jobs(spec, &source);
    let mut keys: Vec<InstanceKey> = jobs.iter().map(|j| j.key).collect();
    keys.sort_unstable();
    keys.dedup();
    let work = || {
        let instances: BTreeMap<InstanceKey, Result<Instance>> = keys
            .par_iter()
            .map(|k| (*k, build_instance(spec, &source, k)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        jobs.par_iter().map(|j| run_job(spec, j, &instances[&j.key])).collect::<Vec<Record>>()
    };
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Spec(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> SweepSpec {
        SweepSpec::parse(text, Path::new("s.toml")).unwrap()
    }

    #[test]
    fn defaults() {
        let s = spec("axis = \"shots\"\nn = [3]\nvalues = [10, 100]\n");
        assert_eq!(s.dataset, Dataset::Synthetic);
        assert_eq!(s.runs, 5);
        assert_eq!(s.constraints, vec![ConstraintKind::None]);
        assert_eq!(s.values, vec![10.0, 100.0]);
        assert_eq!(s.extremes_mode, ExtremesChoice::Auto);
    }

    #[test]
    fn unknown_field_is_located() {
        let err = SweepSpec::parse("axis = \"shots\"\nvalues = [1]\nbogus = 3\n", Path::new("s.toml")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn job_order_and_size_axis() {
        let s = spec("axis = \"size\"\nvalues = [6, 8]\nruns = 2\n");
        let j = jobs(&s, &Source::Synthetic);
        let v: Vec<(usize, usize, usize)> = j.iter().map(|j| (j.cell, j.run, j.key.n)).collect();
        assert_eq!(v, vec![(0, 0, 6), (0, 1, 6), (1, 0, 8), (1, 1, 8)]);
    }

    #[test]
    fn constrained_cluster_sweep_rejected() {
        let s = spec("axis = \"nmax\"\nn = [8]\nvalues = [3]\nconstraints = [\"bnc\"]\n");
        assert!(matches!(s.validate(), Err(Error::Spec(_))));
    }

    #[test]
    fn duplicated_depth_gives_identical_runs() {
        let s = spec("axis = \"depth\"\nn = [3]\nvalues = [1, 1]\nruns = 2\nshots = 20\nmax_iters = 20\nseed = 4\n");
        let recs = run_sweep(&s, Path::new("."), Some(2)).unwrap();
        assert_eq!(recs.len(), 4);
        for (a, b) in recs[..2].iter().zip(&recs[2..]) {
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.tour, b.tour);
            assert_eq!(a.best_cost, b.best_cost);
            assert_eq!(a.final_expectation, b.final_expectation);
            assert_eq!(a.ar_exp, b.ar_exp);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let s = spec("axis = \"shots\"\nn = [3]\nconstraints = [\"none\", \"time\"]\nvalues = [10]\nruns = 3\nmax_iters = 15\n");
        let strip = |v: Vec<Record>| -> Vec<Record> {
            v.into_iter().map(|mut r| {
                r.wall_ms.clear();
                r.eval_ms = None;
                r
            }).collect()
        };
        let a = strip(run_sweep(&s, Path::new("."), Some(1)).unwrap());
        let b = strip(run_sweep(&s, Path::new("."), Some(4)).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn run_failures_are_recorded() {
        // A 9-city subspace exceeds the default table cap.
        let s = spec("axis = \"shots\"\nn = [9]\nvalues = [10]\nruns = 1\nmax_iters = 1\n");
        let recs = run_sweep(&s, Path::new("."), Some(1)).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].error.is_some());
    }

    #[test]
    fn line_col_of_offset() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
