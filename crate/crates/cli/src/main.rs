//! `qts`: run tabu searches and experiment matrices on OR-Library QUBO files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qubo_tabu::angle_opt::OptBudget;
use qubo_tabu::bench::{
    bqpgka_index, bqpgka_name, compute_ecdf, energy_distribution_export, make_reduced_suite,
    run_experiment, AlgorithmSpec, EcdfRun, ExperimentSpec, InstanceRef, ReduceConfig, SummaryRow,
    TargetSource,
};
use qubo_tabu::qubo::orlib::{read_orlib_file, write_orlib};
use qubo_tabu::samplers::{QaoaSamplerConfig, SaConfig, SamplerContext};
use qubo_tabu::tabu::{
    basic_tabu_search, read_trace_csv, select_variables, SelectionMode, TabuParams,
};
use qubo_tabu::{seeded_rng, BitString, MoveTable, Qubo};

#[derive(Parser)]
#[command(
    name = "qts",
    version,
    about = "Tabu search with neighborhood samplers for QUBO problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and print its result as JSON.
    Solve(SolveArgs),
    /// Run an experiment matrix and write traces, summary and manifest.
    Bench(BenchArgs),
    /// Aggregate the traces of a bench run into a fixed-target ECDF.
    Ecdf(EcdfArgs),
    /// Export QAOA and SA energy distributions for one subproblem.
    EnergyDist(EnergyArgs),
    /// Build a suite of reduced instances by clamping.
    Reduce(ReduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Basic,
    BruteForce,
    Sa,
    Qaoa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Selection {
    Greedy,
    WeightedRandom,
}

impl From<Selection> for SelectionMode {
    fn from(s: Selection) -> Self {
        match s {
            Selection::Greedy => SelectionMode::Greedy,
            Selection::WeightedRandom => SelectionMode::WeightedRandom,
        }
    }
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// OR-Library bqp file.
    #[arg(long)]
    file: PathBuf,
    /// Zero-based instance position in the file, or a bqpgka name such as `1d`.
    #[arg(long, default_value = "0")]
    instance: String,
}

impl InstanceArgs {
    fn reference(&self) -> Result<InstanceRef> {
        let (index, name) = match self.instance.parse::<usize>() {
            Ok(i) => (i, None),
            Err(_) => (
                bqpgka_index(&self.instance)
                    .with_context(|| format!("unknown instance name {:?}", self.instance))?,
                Some(self.instance.clone()),
            ),
        };
        Ok(InstanceRef {
            path: self.file.clone(),
            index,
            name,
        })
    }

    fn load(&self) -> Result<(InstanceRef, Qubo)> {
        let r = self.reference()?;
        let all = read_orlib_file(&r.path)?;
        let q = all
            .get(r.index)
            .with_context(|| format!("{} holds {} instances", r.path.display(), all.len()))?
            .clone();
        Ok((r, q))
    }
}

#[derive(Args, Clone)]
struct QaoaArgs {
    /// Circuit depth.
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Penalty scale A; the penalty layer is added when nonzero.
    #[arg(long = "penalty", default_value_t = 0.0)]
    penalty: f64,
    /// Measurements used to pick the candidate.
    #[arg(long = "samples", default_value_t = 10)]
    samples: usize,
    /// Measurements per expectation estimate.
    #[arg(long, default_value_t = 1000)]
    shots: usize,
    /// Angle optimizer evaluation budget.
    #[arg(long, default_value_t = 2000)]
    max_evals: usize,
    /// Also take the best outcome measured during optimization.
    #[arg(long)]
    history: bool,
    #[arg(long)]
    warm_start: bool,
}

impl QaoaArgs {
    fn config(&self, penalty: f64) -> QaoaSamplerConfig {
        QaoaSamplerConfig {
            p: self.p,
            penalized: penalty != 0.0,
            penalty_scale: if penalty != 0.0 { penalty } else { 1.0 },
            samples: self.samples,
            use_optimizer_history: self.history,
            shots: self.shots,
            budget: OptBudget {
                max_evals: self.max_evals,
                ..Default::default()
            },
            warm_start: self.warm_start,
        }
    }
}

#[derive(Args, Clone)]
struct SaArgs {
    #[arg(long, default_value_t = 17.5)]
    temperature: f64,
    #[arg(long, default_value_t = 100)]
    sa_steps: usize,
    #[arg(long, default_value_t = 1)]
    sa_restarts: usize,
}

impl SaArgs {
    fn config(&self) -> SaConfig {
        SaConfig {
            temperature: self.temperature,
            steps: self.sa_steps,
            restarts: self.sa_restarts,
        }
    }
}

fn algorithm_spec(alg: Algorithm, qaoa: &QaoaArgs, sa: &SaArgs) -> AlgorithmSpec {
    match alg {
        Algorithm::Basic => AlgorithmSpec::Basic,
        Algorithm::BruteForce => AlgorithmSpec::BruteForce,
        Algorithm::Sa => AlgorithmSpec::Sa(sa.config()),
        Algorithm::Qaoa => AlgorithmSpec::Qaoa(qaoa.config(qaoa.penalty)),
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "basic")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 10)]
    tenure: usize,
    #[arg(long, default_value_t = 0)]
    rand_tenure: usize,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long)]
    cutoff: Option<usize>,
    /// Subproblem size for sampler algorithms.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop target in the instance's reported sense.
    #[arg(long)]
    target: Option<f64>,
    /// Use the built-in best-known value of the named instance as target.
    #[arg(long)]
    best_known: bool,
    #[arg(long, value_enum, default_value = "greedy")]
    selection: Selection,
    /// Write the trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    qaoa: QaoaArgs,
    #[command(flatten)]
    sa: SaArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment spec as JSON; other matrix flags are ignored when given.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Instance as FILE:INDEX or FILE:NAME (repeatable).
    #[arg(long = "instance")]
    instances: Vec<String>,
    #[arg(long = "algorithm", value_enum)]
    algorithms: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    tenures: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    rand_tenure: usize,
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    /// Seeds; defaults to 0..runs.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, value_enum, default_value = "greedy")]
    selection: Selection,
    /// Stop at the built-in best-known values.
    #[arg(long)]
    best_known: bool,
    #[command(flatten)]
    qaoa: QaoaArgs,
    #[command(flatten)]
    sa: SaArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EcdfArgs {
    /// Output directory of `qts bench`.
    #[arg(long)]
    results: PathBuf,
    /// Number of targets per problem.
    #[arg(long, default_value_t = 10)]
    targets: usize,
    /// Normalize by the built-in best-known values (for negated OR-Library instances).
    #[arg(long)]
    best_known: bool,
    /// Curve CSV; the full report goes next to it as JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// One-flip iterations used to build the reference solution.
    #[arg(long, default_value_t = 100)]
    ref_iters: usize,
    #[arg(long, default_value_t = 10)]
    tenure: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Penalty scales to compare; 0 means no penalty layer.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    penalties: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    draws: usize,
    #[arg(long)]
    no_sa: bool,
    #[command(flatten)]
    qaoa: QaoaArgs,
    #[command(flatten)]
    sa: SaArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    file: PathBuf,
    /// Instances to reduce; all instances of the file by default.
    #[arg(long, value_delimiter = ',')]
    indices: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    per_instance: usize,
    #[arg(long, default_value_t = 20)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    tenure: usize,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Reduced instances in OR-Library format; provenance goes to `<out>.json`.
    #[arg(long)]
    out: PathBuf,
}

/// Configuration problems exit with 2, partial matrix failures with 1.
enum Failure {
    Config(anyhow::Error),
    Partial(usize),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a).map_err(Failure::from),
        Command::Bench(a) => bench(a),
        Command::Ecdf(a) => ecdf(a).map_err(Failure::from),
        Command::EnergyDist(a) => energy(a).map_err(Failure::from),
        Command::Reduce(a) => reduce(a).map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial(n)) => {
            eprintln!("qts: {n} cell(s) failed, see summary.json");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("qts: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn solve(a: SolveArgs) -> Result<()> {
    let (r, q) = a.instance.load()?;
    let name = r.label();
    let target = match (a.target, a.best_known) {
        (Some(t), _) => Some(t),
        (None, true) => Some(
            TargetSource::BestKnown
                .lookup(&name)
                .with_context(|| format!("no best-known value for {name}"))?,
        ),
        (None, false) => None,
    };
    let alg = algorithm_spec(a.algorithm, &a.qaoa, &a.sa);
    if alg.uses_sampler() && a.k.is_none() {
        bail!("--k is required for sampler algorithms");
    }
    let params = TabuParams {
        tenure: a.tenure,
        rand_tenure: a.rand_tenure,
        max_iters: a.max_iters,
        improvement_cutoff: a.cutoff,
        target: target.map(|t| q.sense().internal(t)),
        seed: a.seed,
        k: a.k.filter(|_| alg.uses_sampler()),
        selection: a.selection.into(),
    };
    let out = alg.run(&q, &BitString::zeros(q.n()), &params)?;
    if let Some(path) = &a.trace {
        out.trace.write_csv(create(path)?)?;
    }
    let reached = params.target.and_then(|t| out.trace.first_reaching(t));
    let report = json!({
        "instance": name,
        "algorithm": alg.label(),
        "best_value": q.sense().report(out.best_value),
        "best": out.best.to_string(),
        "iterations": out.trace.iterations(),
        "termination": out.trace.termination,
        "target": target,
        "first_iteration_to_target": reached,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn parse_instance(text: &str) -> Result<InstanceRef> {
    let (file, which) = text
        .rsplit_once(':')
        .with_context(|| format!("instance {text:?} is not FILE:INDEX or FILE:NAME"))?;
    InstanceArgs {
        file: file.into(),
        instance: which.into(),
    }
    .reference()
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let spec = match &a.spec {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            let instances = a
                .instances
                .iter()
                .map(|s| parse_instance(s))
                .collect::<Result<Vec<_>>>()?;
            let algorithms = if a.algorithms.is_empty() {
                vec![AlgorithmSpec::Basic]
            } else {
                a.algorithms
                    .iter()
                    .map(|&alg| algorithm_spec(alg, &a.qaoa, &a.sa))
                    .collect()
            };
            ExperimentSpec {
                instances,
                algorithms,
                tenures: a.tenures.clone(),
                rand_tenure: a.rand_tenure,
                ks: a.ks.clone(),
                seeds: if a.seeds.is_empty() {
                    (0..a.runs).collect()
                } else {
                    a.seeds.clone()
                },
                max_iters: a.max_iters,
                improvement_cutoff: a.cutoff,
                selection: a.selection.into(),
                targets: if a.best_known {
                    TargetSource::BestKnown
                } else {
                    TargetSource::None
                },
                stop_at_target: true,
            }
        }
    };
    let result = run_experiment(&spec).map_err(anyhow::Error::from)?;
    result.write(&a.out).map_err(anyhow::Error::from)?;
    for row in &result.summary {
        match (&row.error, row.best_value) {
            (Some(e), _) => println!("{}\terror: {e}", row.cell),
            (None, Some(v)) => println!(
                "{}\tbest {v}\tfirst-to-target {}",
                row.cell,
                row.first_iteration_to_target
                    .map_or_else(|| "-".to_string(), |i| i.to_string())
            ),
            (None, None) => {}
        }
    }
    match result.failed_cells() {
        0 => Ok(()),
        n => Err(Failure::Partial(n)),
    }
}

fn ecdf(a: EcdfArgs) -> Result<()> {
    let summary_path = a.results.join("summary.json");
    let text = fs::read_to_string(&summary_path)
        .with_context(|| format!("reading {}", summary_path.display()))?;
    let summary: Vec<SummaryRow> = serde_json::from_str(&text)?;
    let mut runs = Vec::new();
    for row in summary.iter().filter(|r| r.error.is_none()) {
        let path = a.results.join("traces").join(format!("{}.csv", row.cell));
        let file = fs::File::open(&path).with_context(|| format!("reading {}", path.display()))?;
        let rows = read_trace_csv(file)?;
        runs.push(EcdfRun {
            problem: row.instance.clone(),
            best: rows.iter().map(|r| r.f_best).collect(),
        });
    }
    let mut optima = BTreeMap::new();
    if a.best_known {
        for r in &runs {
            if let Some(v) = TargetSource::BestKnown.lookup(&r.problem) {
                optima.insert(r.problem.clone(), -v);
            }
        }
    }
    let report = compute_ecdf(&runs, &optima, a.targets)?;
    report.write_curve_csv(create(&a.out)?)?;
    write_json(
        &a.out.with_extension("json"),
        &serde_json::to_value(&report)?,
    )?;
    Ok(())
}

fn energy(a: EnergyArgs) -> Result<()> {
    let (r, q) = a.instance.load()?;
    let x0 = BitString::zeros(q.n());
    let params = TabuParams {
        tenure: a.tenure,
        max_iters: a.ref_iters,
        seed: a.seed,
        ..Default::default()
    };
    let reference = basic_tabu_search(&q, &x0, &params)?.best;
    let table = MoveTable::new(&q, &reference)?;
    let tabu = vec![0; q.n()];
    let mut rng = seeded_rng(a.seed, 2);
    let selected = select_variables(table.values(), &tabu, a.k, SelectionMode::Greedy, &mut rng)?;
    let sub = q.clamp(&reference, &selected)?;
    let ctx = SamplerContext::new(&sub, &table);
    let configs: Vec<QaoaSamplerConfig> =
        a.penalties.iter().map(|&pen| a.qaoa.config(pen)).collect();
    let sa = a.sa.config();
    let data = energy_distribution_export(
        &sub,
        &configs,
        (!a.no_sa).then_some(&sa),
        a.draws,
        &ctx,
        &mut rng,
    )?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    data.write_samples_csv(create(&a.out.join("samples.csv"))?)?;
    data.write_exact_csv(create(&a.out.join("exact.csv"))?)?;
    let reference_energy = sub.reduced().evaluate(&ctx.reference)?;
    write_json(
        &a.out.join("subproblem.json"),
        &json!({
            "instance": r.label(),
            "selected": selected,
            "reference": ctx.reference.to_string(),
            "reference_energy": reference_energy,
            "improvement_probability": data.improvement,
        }),
    )
}

fn reduce(a: ReduceArgs) -> Result<()> {
    let all = read_orlib_file(&a.file)?;
    let indices: Vec<usize> = if a.indices.is_empty() {
        (0..all.len()).collect()
    } else {
        a.indices.clone()
    };
    let mut chosen = Vec::with_capacity(indices.len());
    for &i in &indices {
        chosen.push(
            all.get(i)
                .with_context(|| format!("{} holds {} instances", a.file.display(), all.len()))?
                .clone(),
        );
    }
    let cfg = ReduceConfig {
        per_instance: a.per_instance,
        size: a.size,
        solver: TabuParams {
            tenure: a.tenure,
            max_iters: a.max_iters,
            ..Default::default()
        },
    };
    let suite = make_reduced_suite(&chosen, a.seed, &cfg)?;
    let reduced: Vec<Qubo> = suite.iter().map(|r| r.qubo.clone()).collect();
    create(&a.out)?
        .write_all(write_orlib(&reduced).as_bytes())
        .with_context(|| format!("writing {}", a.out.display()))?;
    let provenance: Vec<serde_json::Value> = suite
        .iter()
        .map(|r| {
            let parent = indices[r.source];
            json!({
                "parent_index": parent,
                "parent_name": bqpgka_name(parent),
                "replicate": r.replicate,
                "selected": r.sub.parent_indices(),
                "clamping_solution": r.sub.base().to_string(),
                "clamping_value": r.source_value,
                // the OR-Library format has no constant term
                "offset": r.qubo.offset(),
            })
        })
        .collect();
    write_json(
        &a.out.with_extension("json"),
        &json!({ "source": a.file, "seed": a.seed, "instances": provenance }),
    )
}
