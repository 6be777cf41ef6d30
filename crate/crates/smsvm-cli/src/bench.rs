//! `bench`: run a methods x datasets x repetitions sweep from a JSON config
//! and emit fixed-column CSV and JSON tables.
//!
//! Synthetic datasets are regenerated for every repetition (rep `r` uses
//! `seed + r`); every repetition draws its own stratified train/test split
//! (`split_seed + r`). A failed run becomes a row whose `status` carries the
//! error instead of aborting the table. Repetitions may run on worker
//! threads; rows are always emitted in config order.

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use smsvm::{
    accuracy, generate_synthetic, read_libsvm_path, run_baseline, svm_smooth, train_test_split,
    BaselineConfig, Dataset64, HyperParams64, StepSchedule, SyntheticSpec,
};

use crate::method::{Method, ScheduleKind};

pub const CSV_HEADER: &str =
    "method,dataset,rep,acc,time_s,grad_evals,hess_evals,obj_evals,data_passes,nnz,status";

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Bench config (JSON; see the README for the schema).
    #[arg(long)]
    pub config: PathBuf,

    /// Write the CSV table here instead of printing it to stdout.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,

    /// Write a JSON copy of the table here.
    #[arg(long)]
    pub out_json: Option<PathBuf>,

    /// Override the config's repetition count.
    #[arg(long)]
    pub reps: Option<usize>,

    /// Override the config's worker-thread count.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Report every wall time as 0.000 so reruns are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
}

fn default_reps() -> usize {
    10
}
fn default_split_seed() -> u64 {
    10_000
}
fn default_test_fraction() -> f64 {
    0.2
}
fn default_threads() -> usize {
    1
}
fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchConfig {
    #[serde(default = "default_reps")]
    reps: usize,
    /// Base seed for per-repetition synthetic data (rep `r` uses `seed + r`).
    #[serde(default)]
    seed: u64,
    /// Base seed for per-repetition train/test splits.
    #[serde(default = "default_split_seed")]
    split_seed: u64,
    #[serde(default = "default_test_fraction")]
    test_fraction: f64,
    #[serde(default = "default_threads")]
    threads: usize,
    #[serde(default)]
    deterministic: bool,
    #[serde(default)]
    output_csv: Option<PathBuf>,
    #[serde(default)]
    output_json: Option<PathBuf>,
    datasets: Vec<DatasetSpec>,
    methods: Vec<MethodSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum DatasetSpec {
    /// Two-centroid Gaussian data, regenerated each repetition.
    Synthetic {
        name: String,
        n: usize,
        m: usize,
        #[serde(default = "default_scale")]
        centroid_scale: f64,
        #[serde(default)]
        sparsity: f64,
        #[serde(default)]
        add_bias: bool,
    },
    /// A libSVM file, parsed once and split per repetition.
    File {
        name: String,
        path: PathBuf,
        #[serde(default)]
        add_bias: bool,
    },
}

impl DatasetSpec {
    fn name(&self) -> &str {
        match self {
            DatasetSpec::Synthetic { name, .. } | DatasetSpec::File { name, .. } => name,
        }
    }
}

/// One method entry. `label` names the table rows (default: `name`) so two
/// entries can run the same method under different knobs. Knobs a method
/// cannot use are rejected rather than ignored.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct MethodSpec {
    name: String,
    label: Option<String>,
    lambda: Option<f64>,
    mu: Option<f64>,
    eps0: Option<f64>,
    eps_min: Option<f64>,
    beta: Option<f64>,
    kkt_tol: Option<f64>,
    max_iters: Option<usize>,
    batch_size: Option<usize>,
    schedule: Option<String>,
    eta0: Option<f64>,
    t0: Option<f64>,
    grad_tol: Option<f64>,
}

#[derive(Debug, Clone)]
struct MethodPlan {
    label: String,
    method: Method,
    lambda: f64,
    mu: f64,
    eps0: f64,
    eps_min: f64,
    beta: f64,
    kkt_tol: f64,
    max_iters: usize,
    batch_size: usize,
    schedule: StepSchedule<f64>,
    grad_tol: Option<f64>,
}

fn resolve_method(spec: &MethodSpec) -> Result<MethodPlan> {
    let method = Method::from_name(&spec.name).with_context(|| {
        let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
        format!("unknown method {:?}; expected one of: {}", spec.name, names.join(", "))
    })?;
    let newton_only = [
        (spec.mu.is_some(), "mu"),
        (spec.eps0.is_some(), "eps0"),
        (spec.eps_min.is_some(), "eps_min"),
        (spec.beta.is_some(), "beta"),
        (spec.kkt_tol.is_some(), "kkt_tol"),
    ];
    let baseline_only = [
        (spec.batch_size.is_some(), "batch_size"),
        (spec.schedule.is_some(), "schedule"),
        (spec.eta0.is_some(), "eta0"),
        (spec.t0.is_some(), "t0"),
        (spec.grad_tol.is_some(), "grad_tol"),
    ];
    let misplaced = if method.is_newton() { &baseline_only } else { &newton_only };
    for (set, what) in misplaced {
        if *set {
            bail!("method {} does not use the {what} knob", spec.name);
        }
    }
    if method == Method::SmsvmL2 && spec.mu.unwrap_or(0.0) != 0.0 {
        bail!("smsvm-l2 fixes mu at 0; use smsvm-l1l2 for an l1 penalty");
    }
    let schedule_kind = match &spec.schedule {
        None => ScheduleKind::InvDecay,
        Some(s) => ScheduleKind::from_name(s)
            .with_context(|| format!("unknown schedule {s:?}; expected constant, inv-decay, or inv-lambda-t"))?,
    };
    Ok(MethodPlan {
        label: spec.label.clone().unwrap_or_else(|| spec.name.clone()),
        method,
        lambda: spec.lambda.unwrap_or(1e-2),
        mu: if method == Method::SmsvmL1l2 { spec.mu.unwrap_or(0.0) } else { 0.0 },
        eps0: spec.eps0.unwrap_or(1.0),
        eps_min: spec.eps_min.unwrap_or(1e-3),
        beta: spec.beta.unwrap_or(2.0),
        kkt_tol: spec.kkt_tol.unwrap_or(1e-4),
        max_iters: spec.max_iters.unwrap_or(if method.is_newton() { 500 } else { 1000 }),
        batch_size: spec.batch_size.unwrap_or(32),
        schedule: schedule_kind.to_schedule(spec.eta0.unwrap_or(0.1), spec.t0.unwrap_or(100.0)),
        grad_tol: spec.grad_tol,
    })
}

/// Where a run's data comes from. Files are parsed (and bias-augmented) once
/// up front; a parse failure is remembered and surfaces as the status of
/// every row that needed the file, so the rest of the table still runs.
enum Source {
    Synthetic {
        n: usize,
        m: usize,
        centroid_scale: f64,
        sparsity: f64,
        add_bias: bool,
    },
    Loaded(std::result::Result<Dataset64, String>),
}

fn load_source(spec: &DatasetSpec) -> Source {
    match spec {
        DatasetSpec::Synthetic {
            n,
            m,
            centroid_scale,
            sparsity,
            add_bias,
            ..
        } => Source::Synthetic {
            n: *n,
            m: *m,
            centroid_scale: *centroid_scale,
            sparsity: *sparsity,
            add_bias: *add_bias,
        },
        DatasetSpec::File { path, add_bias, .. } => {
            let loaded = read_libsvm_path::<f64>(path, None)
                .map(|parsed| {
                    if *add_bias {
                        parsed.data.with_bias_column()
                    } else {
                        parsed.data
                    }
                })
                .map_err(|e| format!("reading {}: {e}", path.display()));
            Source::Loaded(loaded)
        }
    }
}

struct RunStats {
    acc: f64,
    time_s: f64,
    grad_evals: u64,
    hess_evals: u64,
    obj_evals: u64,
    data_passes: u64,
    nnz: usize,
}

type RunOutcome = std::result::Result<RunStats, String>;

fn run_one(source: &Source, plan: &MethodPlan, rep: usize, cfg: &BenchConfig) -> RunOutcome {
    let data = match source {
        Source::Synthetic {
            n,
            m,
            centroid_scale,
            sparsity,
            add_bias,
        } => {
            let spec = SyntheticSpec {
                n: *n,
                m: *m,
                centroid_scale: *centroid_scale,
                sparsity: *sparsity,
                seed: cfg.seed + rep as u64,
            };
            let synth = generate_synthetic::<f64>(&spec).map_err(|e| e.to_string())?;
            if *add_bias {
                synth.data.with_bias_column()
            } else {
                synth.data
            }
        }
        Source::Loaded(Ok(data)) => data.clone(),
        Source::Loaded(Err(msg)) => return Err(msg.clone()),
    };
    let (train, test) = train_test_split(&data, cfg.test_fraction, cfg.split_seed + rep as u64)
        .map_err(|e| e.to_string())?;

    let (w, report) = match plan.method.baseline() {
        Some(baseline) => {
            let config = BaselineConfig {
                schedule: plan.schedule,
                batch_size: plan.batch_size,
                max_iters: plan.max_iters,
                seed: cfg.seed + rep as u64,
                grad_tol: plan.grad_tol,
                ..BaselineConfig::new(baseline, plan.lambda)
            };
            run_baseline(&train, &config).map_err(|e| e.to_string())?
        }
        None => {
            let params = HyperParams64 {
                max_outer_iters: plan.max_iters,
                ..HyperParams64::new(plan.lambda, plan.mu)
                    .with_eps_schedule(plan.eps0, plan.eps_min, plan.beta)
                    .with_kkt_tol(Some(plan.kkt_tol))
            };
            svm_smooth(&train, &params).map_err(|e| e.to_string())?
        }
    };
    let acc = 100.0 * accuracy(&test, &w).map_err(|e| e.to_string())?;
    Ok(RunStats {
        acc,
        time_s: report.wall_time_s,
        grad_evals: report.grad_evals,
        hess_evals: report.hess_evals,
        obj_evals: report.obj_evals,
        data_passes: report.data_passes(),
        nnz: report.final_nnz,
    })
}

/// Runs every `(dataset, method, rep)` job, possibly on several worker
/// threads; the result vector is indexed by job id, so output order never
/// depends on scheduling.
fn execute(sources: &[Source], plans: &[MethodPlan], cfg: &BenchConfig) -> Vec<RunOutcome> {
    let n_jobs = sources.len() * plans.len() * cfg.reps;
    let results: Vec<Mutex<Option<RunOutcome>>> = (0..n_jobs).map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);
    let workers = cfg.threads.clamp(1, n_jobs);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = cursor.fetch_add(1, Ordering::Relaxed);
                if job >= n_jobs {
                    break;
                }
                let rep = job % cfg.reps;
                let method = (job / cfg.reps) % plans.len();
                let dataset = job / (cfg.reps * plans.len());
                let outcome = run_one(&sources[dataset], &plans[method], rep, cfg);
                *results[job].lock().expect("result slot poisoned") = Some(outcome);
            });
        }
    });
    results
        .into_iter()
        .map(|slot| slot.into_inner().expect("result slot poisoned").expect("job ran"))
        .collect()
}

/// Error text embedded in a CSV cell: no commas or line breaks.
fn sanitize(msg: &str) -> String {
    msg.replace(',', ";").replace(['\n', '\r'], " ")
}

fn run_cells(label: &str, dataset: &str, rep: usize, outcome: &RunOutcome, zero_time: bool) -> Vec<String> {
    let mut cells = vec![label.to_string(), dataset.to_string(), rep.to_string()];
    match outcome {
        Ok(s) => {
            let time = if zero_time { 0.0 } else { s.time_s };
            cells.extend([
                format!("{:.1}", s.acc),
                format!("{time:.3}"),
                s.grad_evals.to_string(),
                s.hess_evals.to_string(),
                s.obj_evals.to_string(),
                s.data_passes.to_string(),
                s.nnz.to_string(),
                "ok".to_string(),
            ]);
        }
        Err(msg) => {
            cells.extend(vec![String::new(); 7]);
            cells.push(sanitize(msg));
        }
    }
    cells
}

fn mean_cells(label: &str, dataset: &str, outcomes: &[&RunOutcome], zero_time: bool) -> Vec<String> {
    let ok: Vec<&RunStats> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let mut cells = vec![label.to_string(), dataset.to_string(), "mean".to_string()];
    if ok.is_empty() {
        cells.extend(vec![String::new(); 7]);
    } else {
        let k = ok.len() as f64;
        let mean = |f: &dyn Fn(&RunStats) -> f64| ok.iter().map(|s| f(s)).sum::<f64>() / k;
        let time = if zero_time { 0.0 } else { mean(&|s| s.time_s) };
        cells.extend([
            format!("{:.1}", mean(&|s| s.acc)),
            format!("{time:.3}"),
            format!("{:.1}", mean(&|s| s.grad_evals as f64)),
            format!("{:.1}", mean(&|s| s.hess_evals as f64)),
            format!("{:.1}", mean(&|s| s.obj_evals as f64)),
            format!("{:.2}", mean(&|s| s.data_passes as f64)),
            format!("{:.1}", mean(&|s| s.nnz as f64)),
        ]);
    }
    cells.push(format!("mean({}/{})", ok.len(), outcomes.len()));
    cells
}

#[derive(Serialize)]
struct JsonRow {
    method: String,
    dataset: String,
    rep: usize,
    acc: Option<f64>,
    time_s: Option<f64>,
    grad_evals: Option<u64>,
    hess_evals: Option<u64>,
    obj_evals: Option<u64>,
    data_passes: Option<u64>,
    nnz: Option<u64>,
    status: String,
}

#[derive(Serialize)]
struct JsonAggregate {
    method: String,
    dataset: String,
    reps_ok: usize,
    reps_total: usize,
    acc: Option<f64>,
    time_s: Option<f64>,
    grad_evals: Option<f64>,
    hess_evals: Option<f64>,
    obj_evals: Option<f64>,
    data_passes: Option<f64>,
    nnz: Option<f64>,
}

#[derive(Serialize)]
struct JsonTable {
    schema_version: u32,
    reps: usize,
    seed: u64,
    split_seed: u64,
    test_fraction: f64,
    deterministic: bool,
    rows: Vec<JsonRow>,
    aggregates: Vec<JsonAggregate>,
}

fn json_row(label: &str, dataset: &str, rep: usize, outcome: &RunOutcome, zero_time: bool) -> JsonRow {
    match outcome {
        Ok(s) => JsonRow {
            method: label.into(),
            dataset: dataset.into(),
            rep,
            acc: Some(s.acc),
            time_s: Some(if zero_time { 0.0 } else { s.time_s }),
            grad_evals: Some(s.grad_evals),
            hess_evals: Some(s.hess_evals),
            obj_evals: Some(s.obj_evals),
            data_passes: Some(s.data_passes),
            nnz: Some(s.nnz as u64),
            status: "ok".into(),
        },
        Err(msg) => JsonRow {
            method: label.into(),
            dataset: dataset.into(),
            rep,
            acc: None,
            time_s: None,
            grad_evals: None,
            hess_evals: None,
            obj_evals: None,
            data_passes: None,
            nnz: None,
            status: msg.clone(),
        },
    }
}

fn json_aggregate(label: &str, dataset: &str, outcomes: &[&RunOutcome], zero_time: bool) -> JsonAggregate {
    let ok: Vec<&RunStats> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let k = ok.len() as f64;
    let mean = |f: &dyn Fn(&RunStats) -> f64| {
        if ok.is_empty() {
            None
        } else {
            Some(ok.iter().map(|s| f(s)).sum::<f64>() / k)
        }
    };
    JsonAggregate {
        method: label.into(),
        dataset: dataset.into(),
        reps_ok: ok.len(),
        reps_total: outcomes.len(),
        acc: mean(&|s| s.acc),
        time_s: if zero_time { mean(&|_| 0.0) } else { mean(&|s| s.time_s) },
        grad_evals: mean(&|s| s.grad_evals as f64),
        hess_evals: mean(&|s| s.hess_evals as f64),
        obj_evals: mean(&|s| s.obj_evals as f64),
        data_passes: mean(&|s| s.data_passes as f64),
        nnz: mean(&|s| s.nnz as f64),
    }
}

fn validate_config(cfg: &BenchConfig) -> Result<()> {
    if cfg.reps == 0 {
        bail!("reps must be at least 1");
    }
    if cfg.threads == 0 {
        bail!("threads must be at least 1");
    }
    if !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
        bail!("test_fraction must lie strictly in (0, 1), got {}", cfg.test_fraction);
    }
    if cfg.datasets.is_empty() {
        bail!("the config names no datasets");
    }
    if cfg.methods.is_empty() {
        bail!("the config names no methods");
    }
    for (i, d) in cfg.datasets.iter().enumerate() {
        if cfg.datasets[..i].iter().any(|other| other.name() == d.name()) {
            bail!("duplicate dataset name {:?}; rows would be indistinguishable", d.name());
        }
    }
    Ok(())
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading bench config {}", args.config.display()))?;
    let mut cfg: BenchConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing bench config {}", args.config.display()))?;
    if let Some(reps) = args.reps {
        cfg.reps = reps;
    }
    if let Some(threads) = args.threads {
        cfg.threads = threads;
    }
    if args.deterministic {
        cfg.deterministic = true;
    }
    if let Some(path) = &args.out_csv {
        cfg.output_csv = Some(path.clone());
    }
    if let Some(path) = &args.out_json {
        cfg.output_json = Some(path.clone());
    }
    validate_config(&cfg)?;

    let plans: Vec<MethodPlan> = cfg.methods.iter().map(resolve_method).collect::<Result<_>>()?;
    for (i, p) in plans.iter().enumerate() {
        if plans[..i].iter().any(|other| other.label == p.label) {
            bail!("duplicate method label {:?}; give one entry an explicit \"label\"", p.label);
        }
    }
    let sources: Vec<Source> = cfg.datasets.iter().map(load_source).collect();

    let outcomes = execute(&sources, &plans, &cfg);
    let zero_time = cfg.deterministic;

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut rows = Vec::new();
    let mut aggregates = Vec::new();
    for (d_idx, dataset) in cfg.datasets.iter().enumerate() {
        for (m_idx, plan) in plans.iter().enumerate() {
            let base = (d_idx * plans.len() + m_idx) * cfg.reps;
            let block: Vec<&RunOutcome> = (0..cfg.reps).map(|r| &outcomes[base + r]).collect();
            for (rep, outcome) in block.iter().enumerate() {
                csv.push_str(&run_cells(&plan.label, dataset.name(), rep, outcome, zero_time).join(","));
                csv.push('\n');
                rows.push(json_row(&plan.label, dataset.name(), rep, outcome, zero_time));
            }
            csv.push_str(&mean_cells(&plan.label, dataset.name(), &block, zero_time).join(","));
            csv.push('\n');
            aggregates.push(json_aggregate(&plan.label, dataset.name(), &block, zero_time));
        }
    }

    match &cfg.output_csv {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "wrote {} ({} runs + {} aggregate rows)",
                path.display(),
                rows.len(),
                aggregates.len()
            );
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &cfg.output_json {
        let table = JsonTable {
            schema_version: crate::model::SCHEMA_VERSION,
            reps: cfg.reps,
            seed: cfg.seed,
            split_seed: cfg.split_seed,
            test_fraction: cfg.test_fraction,
            deterministic: cfg.deterministic,
            rows,
            aggregates,
        };
        let text = serde_json::to_string_pretty(&table).context("serializing the JSON table")?;
        fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
