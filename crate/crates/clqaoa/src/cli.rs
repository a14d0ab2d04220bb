//! The `clqaoa` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use clqaoa_core::clock::Clock;
use clqaoa_core::cluster::{Backend, ClqConfig};
use clqaoa_core::heuristics::{ant_colony, simulated_annealing, AcoConfig, HeuristicTour, SaConfig};
use clqaoa_core::instances::{gen_constraints, gen_synthetic, sample_top_subset, ConstraintKind};
use clqaoa_core::oracle::{exact_path_tsp, exact_tsp, extremes, ExtremesMode};
use clqaoa_core::qaoa::{ObjectiveMode, QaoaConfig};
use clqaoa_core::rng::rng_from_seed;
use clqaoa_core::{ConstraintSet, CostMatrix, TspProblem};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::clock::SystemClock;
use crate::formats::{matrix_to_csv, matrix_to_json, read_constraints, read_matrix, write_constraints};
use crate::graph::{graph_to_matrix, RankedNodes, WeightedDigraph};
use crate::records::{read_records, write_json_line, HeuristicRecord, Record};
use crate::report::{summarize, write_summary_csv, DEFAULT_METRICS};
use crate::sweep::{backend_name, cluster_record, qaoa_record, run_sweep, ExtremesChoice, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "clqaoa", version, about = "Constrained TSP with QAOA, exact oracles, heuristics and clustering")]
pub struct Cli {
    /// Root seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with [qaoa], [sa], [aco] and [cluster] overrides.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// How cost extremes are computed: auto, full or subspace.
    #[arg(long, global = true, default_value = "auto")]
    pub extremes_mode: ExtremesChoice,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    None,
    Bnc,
    Road,
    Time,
}

impl From<Kind> for ConstraintKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::None => ConstraintKind::None,
            Kind::Bnc => ConstraintKind::Bnc,
            Kind::Road => ConstraintKind::Road,
            Kind::Time => ConstraintKind::Time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    /// Shortest closed tour.
    Closed,
    /// Shortest open path with free endpoints.
    Open,
    /// Shortest path from --entry to --exit.
    Path,
    /// Cost extremes over visiting sequences.
    Subspace,
    /// Cost extremes over all bitstrings.
    Full,
    /// Cost extremes with --extremes-mode.
    Extremes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Sa,
    Aco,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    Sampled,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Qaoa,
}

#[derive(Debug, Clone, clap::Args)]
pub struct QaoaArgs {
    #[arg(long)]
    pub p: Option<usize>,
    /// Shots per objective evaluation.
    #[arg(long)]
    pub shots: Option<usize>,
    /// Shots in the final sampling round.
    #[arg(long)]
    pub final_shots: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub objective: Option<Objective>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic (or graph-derived) matrix and optional constraints.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "none")]
        constraints: Kind,
        /// Where the constraint file goes; required unless --constraints none.
        #[arg(long)]
        constraints_out: Option<PathBuf>,
        /// Road graph CSV; the matrix then holds travel times.
        #[arg(long, requires = "ranks")]
        graph: Option<PathBuf>,
        /// Ranked node list for --graph.
        #[arg(long, requires = "graph")]
        ranks: Option<PathBuf>,
    },
    /// Single QAOA runs, one record per run.
    Solve {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[command(flatten)]
        qaoa: QaoaArgs,
        /// Run r uses seed + r.
        #[arg(long, default_value_t = 1)]
        runs: usize,
    },
    /// Exact tours and cost extremes.
    Oracle {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "closed")]
        mode: OracleMode,
        #[arg(long)]
        entry: Option<usize>,
        #[arg(long)]
        exit: Option<usize>,
    },
    /// Simulated annealing and ant colony baselines.
    Baseline {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        /// Run r uses seed + r.
        #[arg(long, default_value_t = 1)]
        runs: usize,
    },
    /// The recursive clustered solver.
    ClusterSolve {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[command(flatten)]
        qaoa: QaoaArgs,
        /// Also run the ant colony and report relative_ratio.
        #[arg(long)]
        compare_aco: bool,
        /// Write the cluster tree as JSON.
        #[arg(long)]
        tree_out: Option<PathBuf>,
    },
    /// Run an experiment sweep described by a TOML file.
    Sweep {
        spec: PathBuf,
        /// Also write the CSV summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Aggregate JSON-lines records into a CSV table.
    Report {
        #[arg(required = true)]
        records: Vec<PathBuf>,
        /// Comma-separated metric names.
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

#[derive(Debug, Default)]
struct FileConfig {
    qaoa: Option<toml::Value>,
    sa: Option<toml::Value>,
    aco: Option<toml::Value>,
    cluster: Option<toml::Value>,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let cfg = FileConfig {
        qaoa: table.remove("qaoa"),
        sa: table.remove("sa"),
        aco: table.remove("aco"),
        cluster: table.remove("cluster"),
    };
    if let Some(k) = table.keys().next() {
        bail!("{}: unknown section [{k}] (expected qaoa, sa, aco, cluster)", path.display());
    }
    Ok(cfg)
}

/// Overlays the keys of a config section onto `base`. Unknown keys are
/// rejected.
fn merge<T: Serialize + DeserializeOwned>(base: &T, section: Option<&toml::Value>, name: &str) -> anyhow::Result<T> {
    let Some(over) = section else {
        return Ok(toml::Value::try_from(base)?.try_into()?);
    };
    let over = over.as_table().ok_or_else(|| anyhow!("config section [{name}] must be a table"))?;
    let mut value = toml::Value::try_from(base)?;
    let table = value.as_table_mut().expect("structs serialize to tables");
    for (k, v) in over {
        table.insert(k.clone(), v.clone());
    }
    let merged: T = value.try_into().with_context(|| format!("config section [{name}]"))?;
    let check = toml::Value::try_from(&merged)?;
    if let Some(k) = over.keys().find(|k| !check.as_table().is_some_and(|t| t.contains_key(*k))) {
        bail!("config section [{name}]: unknown key `{k}`");
    }
    Ok(merged)
}

fn qaoa_config(args: &QaoaArgs, file: &FileConfig, seed: u64) -> anyhow::Result<QaoaConfig> {
    let mut cfg = merge(&QaoaConfig::new(1, 100), file.qaoa.as_ref(), "qaoa")?;
    let file_sets_final = file.qaoa.as_ref().and_then(|v| v.get("final_shots")).is_some();
    if let Some(p) = args.p {
        cfg.p = p;
    }
    if let Some(s) = args.shots {
        cfg.shots = s;
    }
    cfg.final_shots = match args.final_shots {
        Some(s) => s,
        None if file_sets_final => cfg.final_shots,
        None => cfg.shots,
    };
    if let Some(m) = args.max_iters {
        cfg.max_iters = m;
    }
    if let Some(o) = args.objective {
        cfg.objective = match o {
            Objective::Sampled => ObjectiveMode::Sampled,
            Objective::Exact => ObjectiveMode::Exact,
        };
    }
    cfg.seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

struct Output(Box<dyn Write>);

impl Output {
    fn open(path: Option<&Path>) -> anyhow::Result<Self> {
        Ok(Output(match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        }))
    }

    fn line<T: Serialize>(&mut self, value: &T) -> anyhow::Result<()> {
        write_json_line(&mut self.0, value)?;
        Ok(())
    }

    fn finish(mut self) -> anyhow::Result<()> {
        self.0.flush()?;
        Ok(())
    }
}

fn load_problem(matrix: &Path, constraints: Option<&Path>) -> anyhow::Result<TspProblem> {
    let cost = read_matrix(matrix)?;
    let cons = match constraints {
        Some(p) => read_constraints(p, cost.n())?,
        None => ConstraintSet::none(),
    };
    Ok(TspProblem::new(cost, cons)?)
}

fn problem_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| "matrix".into(), |s| s.to_string_lossy().into_owned())
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let file = load_config(cli.config.as_deref())?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gen { n, constraints, constraints_out, graph, ranks } => {
            let kind = ConstraintKind::from(*constraints);
            if kind != ConstraintKind::None && constraints_out.is_none() {
                bail!("--constraints {} needs --constraints-out", kind.name());
            }
            let mut rng = rng_from_seed(cli.seed);
            let cost = match (graph, ranks) {
                (Some(g), Some(r)) => {
                    let g = WeightedDigraph::read(g)?;
                    let r = RankedNodes::read(r)?;
                    graph_to_matrix(&g, &sample_top_subset(r.as_slice(), *n, &mut rng)?)?
                }
                _ => gen_synthetic(*n, &mut rng)?,
            };
            let cons = gen_constraints(kind, *n, &mut rng)?;
            let csv = out.is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")));
            let text = if csv { matrix_to_csv(&cost) } else { matrix_to_json(&cost) };
            let mut o = Output::open(out)?;
            o.0.write_all(text.as_bytes())?;
            o.finish()?;
            if let Some(p) = constraints_out {
                write_constraints(p, &cons, *n)?;
            }
        }
        Command::Solve { matrix, constraints, qaoa, runs } => {
            let problem = load_problem(matrix, constraints.as_deref())?;
            let mode = cli.extremes_mode.resolve(problem.n());
            let ex = extremes(&problem, mode)?;
            let mut o = Output::open(out)?;
            for r in 0..*runs {
                let seed = cli.seed.wrapping_add(r as u64);
                let cfg = qaoa_config(qaoa, &file, seed)?;
                let base = Record {
                    run: Some(r),
                    method: "qaoa".into(),
                    problem_id: problem_id(matrix),
                    n: problem.n(),
                    seed,
                    ..Record::default()
                };
                let rec = qaoa_record(&problem, &cfg, Some(&ex), base, &SystemClock::new())?;
                o.line(&rec)?;
            }
            o.finish()?;
        }
        Command::Oracle { matrix, constraints, mode, entry, exit } => {
            let problem = load_problem(matrix, constraints.as_deref())?;
            let cost = problem.cost();
            let value = match mode {
                OracleMode::Closed | OracleMode::Open => {
                    let (c, tour) = exact_tsp(cost, *mode == OracleMode::Closed)?;
                    tour_json(*mode, c, &tour)
                }
                OracleMode::Path => {
                    let (Some(a), Some(b)) = (entry, exit) else {
                        bail!("--mode path needs --entry and --exit");
                    };
                    let (c, tour) = exact_path_tsp(cost, *a, *b)?;
                    tour_json(*mode, c, &tour)
                }
                OracleMode::Subspace | OracleMode::Full | OracleMode::Extremes => {
                    let m = match mode {
                        OracleMode::Subspace => ExtremesMode::Subspace,
                        OracleMode::Full => ExtremesMode::Full,
                        _ => cli.extremes_mode.resolve(problem.n()),
                    };
                    serde_json::to_value(extremes(&problem, m)?)?
                }
            };
            let mut o = Output::open(out)?;
            o.line(&value)?;
            o.finish()?;
        }
        Command::Baseline { matrix, method, runs } => {
            let cost = read_matrix(matrix)?;
            let sa = merge(&SaConfig::default(), file.sa.as_ref(), "sa")?;
            let aco = merge(&AcoConfig::default(), file.aco.as_ref(), "aco")?;
            let mut o = Output::open(out)?;
            for r in 0..*runs {
                let seed = cli.seed.wrapping_add(r as u64);
                if matches!(method, Method::Sa | Method::Both) {
                    o.line(&timed("sa", &cost, seed, || simulated_annealing(&cost, &sa.with_seed(seed)))?)?;
                }
                if matches!(method, Method::Aco | Method::Both) {
                    o.line(&timed("aco", &cost, seed, || ant_colony(&cost, &aco.with_seed(seed)))?)?;
                }
            }
            o.finish()?;
        }
        Command::ClusterSolve { matrix, n_max, backend, qaoa, compare_aco, tree_out } => {
            let cost = read_matrix(matrix)?;
            let qcfg = qaoa_config(qaoa, &file, 0)?;
            let mut cfg = merge(&ClqConfig::qaoa(5, qcfg.clone()), file.cluster.as_ref(), "cluster")?;
            cfg.qaoa = qcfg;
            if file.cluster.as_ref().and_then(|c| c.get("backend")).is_none() && backend.is_none() {
                cfg.backend = Backend::Exact;
            }
            if let Some(b) = backend {
                cfg.backend = match b {
                    BackendArg::Exact => Backend::Exact,
                    BackendArg::Qaoa => Backend::Qaoa,
                };
            }
            if let Some(m) = n_max {
                cfg.n_max = *m;
            }
            cfg.seed = cli.seed;
            let aco_cost = if *compare_aco {
                let aco = merge(&AcoConfig::default(), file.aco.as_ref(), "aco")?;
                Some(ant_colony(&cost, &aco.with_seed(cli.seed))?.cost)
            } else {
                None
            };
            let base = Record {
                method: "clqaoa".into(),
                problem_id: problem_id(matrix),
                n: cost.n(),
                seed: cli.seed,
                backend: Some(backend_name(cfg.backend).into()),
                ..Record::default()
            };
            let (rec, tree) = cluster_record(&cost, &cfg, aco_cost, base, &SystemClock::new())?;
            if let Some(path) = tree_out {
                let text = serde_json::to_string_pretty(&tree)?;
                std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            let mut o = Output::open(out)?;
            o.line(&rec)?;
            o.finish()?;
        }
        Command::Sweep { spec, summary } => {
            let s = SweepSpec::read(spec)?;
            let base = spec.parent().unwrap_or(Path::new("."));
            let records = run_sweep(&s, base, cli.threads)?;
            let mut o = Output::open(out)?;
            for r in &records {
                o.line(r)?;
            }
            o.finish()?;
            if let Some(p) = summary {
                let rows = summarize(&records, &DEFAULT_METRICS);
                let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
                write_summary_csv(&rows, BufWriter::new(f))?;
            }
        }
        Command::Report { records, metrics } => {
            let mut all = Vec::new();
            for p in records {
                let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
                all.extend(read_records(BufReader::new(f), p)?);
            }
            let names: Vec<&str> = match metrics {
                Some(m) => m.iter().map(String::as_str).collect(),
                None => DEFAULT_METRICS.to_vec(),
            };
            let rows = summarize(&all, &names);
            let o = Output::open(out)?;
            write_summary_csv(&rows, o.0)?;
        }
    }
    Ok(())
}

fn tour_json(mode: OracleMode, cost: f64, tour: &[usize]) -> serde_json::Value {
    let name = match mode {
        OracleMode::Closed => "closed",
        OracleMode::Open => "open",
        _ => "path",
    };
    serde_json::json!({ "mode": name, "cost": cost, "tour": tour })
}

fn timed(
    method: &str,
    cost: &CostMatrix,
    seed: u64,
    f: impl FnOnce() -> clqaoa_core::Result<HeuristicTour>,
) -> anyhow::Result<HeuristicRecord> {
    let clock = SystemClock::new();
    let t0 = clock.now();
    let t = f()?;
    Ok(HeuristicRecord {
        method: method.into(),
        n: cost.n(),
        seed,
        cost: t.cost,
        tour: t.tour,
        wall_ms: 1e3 * (clock.now() - t0),
    })
}
