//! `train`: fit a model on a libSVM file, write the model JSON, and print a
//! run report.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use smsvm::{
    accuracy, read_libsvm_path, run_baseline, svm_smooth, BaselineConfig, Dataset64, HyperParams64,
    SolveReport64,
};

use crate::method::{Method, ScheduleKind};
use crate::model::{HyperparamsJson, ModelFile, SCHEMA_VERSION};

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Training method.
    #[arg(long, value_enum, default_value_t = Method::SmsvmL1l2)]
    pub method: Method,

    /// Training data in libSVM format (`.gz` is decompressed transparently).
    #[arg(long)]
    pub data: PathBuf,

    /// Where to write the model JSON.
    #[arg(long)]
    pub out: PathBuf,

    /// Also write the run report JSON here (it always goes to stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// l2 regularization weight.
    #[arg(long, default_value_t = 1e-2, allow_negative_numbers = true)]
    pub lambda: f64,

    /// l1 regularization weight (smsvm-l1l2 only).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,

    /// Initial smoothing parameter of the continuation schedule.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub eps0: f64,

    /// Final smoothing parameter of the continuation schedule.
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub eps_min: f64,

    /// Smoothing reduction factor (> 1).
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub beta: f64,

    /// KKT residual to polish for after the continuation schedule.
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    pub kkt_tol: f64,

    /// Return right after the schedule instead of polishing to --kkt-tol.
    #[arg(long)]
    pub no_polish: bool,

    /// Iteration cap: Newton steps for the smsvm methods, first-order steps
    /// for the baselines.
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,

    /// Seed for randomized companions (SGD shuffling; the Newton solver is
    /// deterministic regardless).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Append a constant-1 feature to every row (subject to the same
    /// penalties as every other weight).
    #[arg(long)]
    pub add_bias: bool,

    /// Mini-batch size (sgd only).
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,

    /// Step-size schedule (subgrad/sgd only).
    #[arg(long, value_enum, default_value_t = ScheduleKind::InvDecay)]
    pub step_schedule: ScheduleKind,

    /// Base step size for the constant and inv-decay schedules.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub eta0: f64,

    /// Decay horizon for the inv-decay schedule.
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub t0: f64,

    /// Stop a baseline early once the (sub)gradient infinity norm falls to
    /// this level.
    #[arg(long, allow_negative_numbers = true)]
    pub grad_tol: Option<f64>,
}

/// Run report printed by `train`; `kkt_residual` is the min-norm subgradient
/// norm for the Newton methods and the plain (sub)gradient infinity norm for
/// baselines. Accuracy is a percentage at full precision (tables round to
/// one decimal, the JSON does not).
#[derive(Serialize)]
struct TrainReport {
    schema_version: u32,
    command: &'static str,
    method: String,
    data: String,
    n_samples: usize,
    n_features: usize,
    bias_augmented: bool,
    lambda: f64,
    mu: f64,
    iterations: u64,
    obj_evals: u64,
    grad_evals: u64,
    hess_evals: u64,
    data_passes: u64,
    wall_time_s: f64,
    kkt_residual: f64,
    final_eps: f64,
    nnz: usize,
    train_accuracy: f64,
}

fn validate(args: &TrainArgs) -> Result<()> {
    if !(args.lambda.is_finite() && args.lambda >= 0.0) {
        bail!("--lambda must be finite and >= 0, got {}", args.lambda);
    }
    if !(args.mu.is_finite() && args.mu >= 0.0) {
        bail!("--mu must be finite and >= 0, got {}", args.mu);
    }
    if args.mu != 0.0 && args.method != Method::SmsvmL1l2 {
        bail!(
            "--mu only applies to smsvm-l1l2; {} was requested with mu = {}",
            args.method.name(),
            args.mu
        );
    }
    Ok(())
}

/// The effective l1 weight: zero for everything but smsvm-l1l2.
fn effective_mu(args: &TrainArgs) -> f64 {
    if args.method == Method::SmsvmL1l2 {
        args.mu
    } else {
        0.0
    }
}

pub fn newton_params(args: &TrainArgs) -> HyperParams64 {
    let params = HyperParams64::new(args.lambda, effective_mu(args))
        .with_eps_schedule(args.eps0, args.eps_min, args.beta)
        .with_kkt_tol(if args.no_polish { None } else { Some(args.kkt_tol) })
        .with_seed(args.seed);
    HyperParams64 {
        max_outer_iters: args.max_iters,
        ..params
    }
}

fn baseline_config(args: &TrainArgs, method: smsvm::BaselineMethod) -> BaselineConfig<f64> {
    BaselineConfig {
        schedule: args.step_schedule.to_schedule(args.eta0, args.t0),
        batch_size: args.batch_size,
        max_iters: args.max_iters,
        seed: args.seed,
        grad_tol: args.grad_tol,
        ..BaselineConfig::new(method, args.lambda)
    }
}

fn fit(args: &TrainArgs, data: &Dataset64) -> Result<(Vec<f64>, SolveReport64)> {
    match args.method.baseline() {
        Some(baseline) => run_baseline(data, &baseline_config(args, baseline))
            .with_context(|| format!("{} failed", args.method.name())),
        None => {
            svm_smooth(data, &newton_params(args)).with_context(|| format!("{} failed", args.method.name()))
        }
    }
}

/// Provenance block for the model file: only the knobs the method actually
/// used are recorded.
fn hyperparams_json(args: &TrainArgs) -> HyperparamsJson {
    let mut h = HyperparamsJson {
        lambda: args.lambda,
        seed: args.seed,
        max_iters: Some(args.max_iters as u64),
        ..HyperparamsJson::default()
    };
    if args.method.is_newton() {
        h.mu = Some(effective_mu(args));
        h.eps0 = Some(args.eps0);
        h.eps_min = Some(args.eps_min);
        h.beta = Some(args.beta);
        h.kkt_tol = (!args.no_polish).then_some(args.kkt_tol);
    } else {
        h.schedule = Some(args.step_schedule.name().into());
        match args.step_schedule {
            ScheduleKind::Constant => h.eta0 = Some(args.eta0),
            ScheduleKind::InvDecay => {
                h.eta0 = Some(args.eta0);
                h.t0 = Some(args.t0);
            }
            ScheduleKind::InvLambdaT => {}
        }
        if args.method == Method::Sgd {
            h.batch_size = Some(args.batch_size as u64);
        }
        h.grad_tol = args.grad_tol;
    }
    h
}

pub fn run(args: &TrainArgs) -> Result<()> {
    validate(args)?;
    let parsed = read_libsvm_path::<f64>(&args.data, None)
        .with_context(|| format!("reading training data {}", args.data.display()))?;
    let n_raw = parsed.data.n_features();
    let data = if args.add_bias {
        parsed.data.with_bias_column()
    } else {
        parsed.data
    };

    let (weights, report) = fit(args, &data)?;
    let train_accuracy = 100.0 * accuracy(&data, &weights).context("scoring the training set")?;

    let model = ModelFile {
        schema_version: SCHEMA_VERSION,
        method: args.method.name().into(),
        n_features: n_raw,
        bias_augmented: args.add_bias,
        weights,
        label_map: parsed.label_map.into(),
        hyperparams: hyperparams_json(args),
    };
    model.save(&args.out)?;

    let train_report = TrainReport {
        schema_version: SCHEMA_VERSION,
        command: "train",
        method: args.method.name().into(),
        data: args.data.display().to_string(),
        n_samples: data.n_samples(),
        n_features: n_raw,
        bias_augmented: args.add_bias,
        lambda: args.lambda,
        mu: effective_mu(args),
        iterations: report.iterations,
        obj_evals: report.obj_evals,
        grad_evals: report.grad_evals,
        hess_evals: report.hess_evals,
        data_passes: report.data_passes(),
        wall_time_s: report.wall_time_s,
        kkt_residual: report.final_kkt,
        final_eps: report.final_eps,
        nnz: report.final_nnz,
        train_accuracy,
    };
    let text = serde_json::to_string_pretty(&train_report).context("serializing the run report")?;
    println!("{text}");
    if let Some(path) = &args.report {
        fs::write(path, text + "\n")
            .with_context(|| format!("writing report file {}", path.display()))?;
    }
    Ok(())
}
