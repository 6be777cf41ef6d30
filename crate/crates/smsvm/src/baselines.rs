//! Comparison optimizers over the exact (non-smoothed) hinge objectives:
//! full subgradient descent, mini-batch stochastic subgradient descent, and
//! Polak-Ribiere+ nonlinear conjugate gradient. They exist to make
//! benchmark-table comparisons against the Newton solver well-defined, so all
//! of them fill the same [`SolveReport`] counters.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf, norm_sq};
use crate::params::{DEFAULT_ARMIJO_MAX_HALVINGS, DEFAULT_C1};
use crate::report::{EvalKind, SolveReport};
use crate::scalar::{cast, Float};

/// Mini-batch size used by the reference SGD configuration.
pub const DEFAULT_BATCH_SIZE: usize = 32;
/// Default iteration cap for the first-order methods.
pub const DEFAULT_MAX_ITERS: usize = 1000;
/// Default `eta0` of the decaying step schedule.
pub const DEFAULT_ETA0: f64 = 0.1;
/// Default `t0` of the decaying step schedule.
pub const DEFAULT_T0: f64 = 100.0;

/// Step-size rule for the (stochastic) subgradient methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule<F> {
    /// `eta_t = c` for every step.
    Constant(F),
    /// `eta_t = eta0 / (1 + t / t0)` with `t` counted from zero.
    InvDecay { eta0: F, t0: F },
    /// `eta_t = 1 / (lambda (t + 1))`; requires `lambda > 0`.
    InvLambdaT,
}

impl<F: Float> Default for StepSchedule<F> {
    fn default() -> Self {
        StepSchedule::InvDecay {
            eta0: cast(DEFAULT_ETA0),
            t0: cast(DEFAULT_T0),
        }
    }
}

impl<F: Float> StepSchedule<F> {
    fn eta(&self, t: usize, lambda: F) -> F {
        let tf = F::from(t).expect("iteration count fits the scalar type");
        match *self {
            StepSchedule::Constant(c) => c,
            StepSchedule::InvDecay { eta0, t0 } => eta0 / (F::one() + tf / t0),
            StepSchedule::InvLambdaT => (lambda * (tf + F::one())).recip(),
        }
    }

    fn validate(&self, lambda: F) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam { msg });
        match *self {
            StepSchedule::Constant(c) if !(c > F::zero() && c.is_finite()) => {
                bad(format!("constant step size must be finite and > 0, got {c}"))
            }
            StepSchedule::InvDecay { eta0, t0 }
                if !(eta0 > F::zero() && eta0.is_finite() && t0 > F::zero() && t0.is_finite()) =>
            {
                bad(format!("decay schedule needs eta0 > 0 and t0 > 0, got ({eta0}, {t0})"))
            }
            StepSchedule::InvLambdaT if !(lambda > F::zero()) => {
                bad("1/(lambda t) schedule requires lambda > 0".into())
            }
            _ => Ok(()),
        }
    }
}

/// Which baseline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    /// Full-data subgradient descent on the l2-regularized hinge objective.
    Subgrad,
    /// Mini-batch stochastic subgradient descent, reshuffled each epoch.
    Sgd,
    /// Polak-Ribiere+ CG on the plain mean-hinge objective (no l2 term).
    Cg,
    /// Polak-Ribiere+ CG with the `lambda/2 ||w||^2` term added.
    CgL2,
}

impl BaselineMethod {
    /// Stable name used in benchmark tables.
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineMethod::Subgrad => "subgrad",
            BaselineMethod::Sgd => "sgd",
            BaselineMethod::Cg => "cg",
            BaselineMethod::CgL2 => "cg_l2",
        }
    }
}

/// Configuration shared by all baselines. Fields a method does not use are
/// ignored (e.g. `batch_size` outside SGD; `lambda` by plain CG, whose
/// objective has no l2 term).
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig<F> {
    pub method: BaselineMethod,
    pub lambda: F,
    pub schedule: StepSchedule<F>,
    pub batch_size: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Starting point; zeros when absent.
    pub w0: Option<Vec<F>>,
    /// Early stop once the (sub)gradient infinity norm falls to this level.
    pub grad_tol: Option<F>,
    /// Armijo constant for the CG line search.
    pub c1: F,
    /// Halving budget for the CG line search.
    pub armijo_max_halvings: usize,
}

impl<F: Float> BaselineConfig<F> {
    pub fn new(method: BaselineMethod, lambda: F) -> Self {
        Self {
            method,
            lambda,
            schedule: StepSchedule::default(),
            batch_size: DEFAULT_BATCH_SIZE,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
            w0: None,
            grad_tol: None,
            c1: cast(DEFAULT_C1),
            armijo_max_halvings: DEFAULT_ARMIJO_MAX_HALVINGS,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam { msg });
        if !(self.lambda >= F::zero() && self.lambda.is_finite()) {
            return bad(format!("lambda must be finite and >= 0, got {}", self.lambda));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if let Some(tol) = self.grad_tol {
            if !(tol >= F::zero()) {
                return bad(format!("grad_tol must be >= 0 when set, got {tol}"));
            }
        }
        if !(self.c1 > F::zero() && self.c1 < F::one()) {
            return bad(format!("c1 must lie in (0, 1), got {}", self.c1));
        }
        if self.armijo_max_halvings == 0 {
            return bad("armijo_max_halvings must be at least 1".into());
        }
        self.schedule.validate(self.lambda)
    }

    fn initial_w(&self, m: usize) -> Result<Vec<F>> {
        match &self.w0 {
            None => Ok(vec![F::zero(); m]),
            Some(w) if w.len() == m => Ok(w.clone()),
            Some(w) => Err(Error::DimensionMismatch {
                what: "baseline starting point",
                expected: m,
                got: w.len(),
            }),
        }
    }
}

/// Exact hinge objective `lambda/2 ||w||^2 + (1/n) sum_i max(0, 1 - y_i x_i . w)`.
/// Pure function: callers account for the data pass.
pub fn hinge_objective<F: Float>(data: &Dataset<F>, w: &[F], lambda: F) -> Result<F> {
    if w.len() != data.n_features() {
        return Err(Error::DimensionMismatch {
            what: "hinge objective weights",
            expected: data.n_features(),
            got: w.len(),
        });
    }
    let n = F::from(data.n_samples()).expect("sample count fits the scalar type");
    let mut loss = F::zero();
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        loss += (F::one() - y * row.dot(w)).max(F::zero());
    }
    Ok(cast::<F>(0.5) * lambda * norm_sq(w) + loss / n)
}

/// Subgradient of the hinge objective over `batch` (all samples when `None`):
/// `lambda w - (1/|batch|) sum_{i in batch, margin_i > 0} y_i x_i`. At the
/// hinge kink (margin exactly 1, i.e. `u_i = 0`) the zero element of the
/// subdifferential is chosen, so the sample contributes nothing. Samples are
/// accumulated in ascending index order for bitwise reproducibility.
/// Pure function: callers account for the (fractional) data pass.
pub fn hinge_subgradient<F: Float>(
    data: &Dataset<F>,
    w: &[F],
    lambda: F,
    batch: Option<&[usize]>,
) -> Result<Vec<F>> {
    if w.len() != data.n_features() {
        return Err(Error::DimensionMismatch {
            what: "hinge subgradient weights",
            expected: data.n_features(),
            got: w.len(),
        });
    }
    let mut acc = vec![F::zero(); w.len()];
    let mut accumulate = |i: usize| -> Result<()> {
        let row = data.rows().get(i).ok_or_else(|| Error::InvalidParam {
            msg: format!("batch index {i} out of range for {} samples", data.n_samples()),
        })?;
        let y = data.labels()[i];
        let u = F::one() - y * row.dot(w);
        if u > F::zero() {
            for (k, v) in row.iter() {
                acc[k] -= y * v;
            }
        }
        Ok(())
    };
    let count = match batch {
        None => {
            for i in 0..data.n_samples() {
                accumulate(i)?;
            }
            data.n_samples()
        }
        Some(idx) => {
            if idx.is_empty() {
                return Err(Error::InvalidParam {
                    msg: "subgradient batch must not be empty".into(),
                });
            }
            let mut sorted = idx.to_vec();
            sorted.sort_unstable();
            for &i in &sorted {
                accumulate(i)?;
            }
            sorted.len()
        }
    };
    let inv = F::from(count).expect("batch size fits the scalar type").recip();
    Ok(w.iter()
        .zip(&acc)
        .map(|(&wi, &ai)| lambda * wi + ai * inv)
        .collect())
}

fn check_finite<F: Float>(w: &[F], iter: usize) -> Result<()> {
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure {
            iter,
            msg: "iterate diverged to non-finite values".into(),
        });
    }
    Ok(())
}

/// Finalizes a baseline report: the residual is the infinity norm of the full
/// hinge subgradient (one counted pass), and `final_eps = 0` records that the
/// exact hinge was optimized.
fn finish_report<F: Float>(
    data: &Dataset<F>,
    w: &[F],
    lambda: F,
    report: &mut SolveReport<F>,
    start: std::time::Instant,
) -> Result<()> {
    let g = hinge_subgradient(data, w, lambda, None)?;
    report.count_data_pass(EvalKind::Gradient);
    report.final_kkt = norm_inf(&g);
    report.final_eps = F::zero();
    report.final_nnz = w.iter().filter(|&&x| x != F::zero()).count();
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(())
}

/// Full-data subgradient descent: `w <- w - eta_t g_t`. Stops on `max_iters`
/// or once `||g||_inf <= grad_tol` (checked before stepping, so a stationary
/// start returns `w0` untouched).
pub fn subgradient_descent<F: Float>(
    data: &Dataset<F>,
    config: &BaselineConfig<F>,
) -> Result<(Vec<F>, SolveReport<F>)> {
    config.validate()?;
    let start = std::time::Instant::now();
    let mut report = SolveReport::new();
    let mut w = config.initial_w(data.n_features())?;
    for t in 0..config.max_iters {
        let g = hinge_subgradient(data, &w, config.lambda, None)?;
        report.count_data_pass(EvalKind::Gradient);
        if config.grad_tol.is_some_and(|tol| norm_inf(&g) <= tol) {
            break;
        }
        let eta = config.schedule.eta(t, config.lambda);
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= eta * *gi;
        }
        check_finite(&w, t)?;
        report.iterations += 1;
    }
    finish_report(data, &w, config.lambda, &mut report, start)?;
    Ok((w, report))
}

/// Mini-batch stochastic subgradient descent. Each epoch reshuffles a
/// permutation of the samples and consumes it in consecutive chunks, so every
/// batch is drawn without replacement; `n / batch_size` steps add up to one
/// data pass. Batch indices are sorted before accumulation, which makes
/// `batch_size = n` coincide bitwise with [`subgradient_descent`].
pub fn sgd<F: Float>(data: &Dataset<F>, config: &BaselineConfig<F>) -> Result<(Vec<F>, SolveReport<F>)> {
    config.validate()?;
    let n = data.n_samples();
    if config.batch_size > n {
        return Err(Error::InvalidParam {
            msg: format!("batch_size {} exceeds the {} samples", config.batch_size, n),
        });
    }
    let start = std::time::Instant::now();
    let mut report = SolveReport::new();
    let mut w = config.initial_w(data.n_features())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut cursor = n; // forces a shuffle before the first batch
    for t in 0..config.max_iters {
        if cursor + config.batch_size > n {
            perm.shuffle(&mut rng);
            cursor = 0;
        }
        let batch = &perm[cursor..cursor + config.batch_size];
        cursor += config.batch_size;
        let g = hinge_subgradient(data, &w, config.lambda, Some(batch))?;
        report.count_batch_pass(EvalKind::Gradient, batch.len(), n);
        if config.grad_tol.is_some_and(|tol| norm_inf(&g) <= tol) {
            break;
        }
        let eta = config.schedule.eta(t, config.lambda);
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= eta * *gi;
        }
        check_finite(&w, t)?;
        report.iterations += 1;
    }
    finish_report(data, &w, config.lambda, &mut report, start)?;
    Ok((w, report))
}

/// Objective/gradient pair consumed by the CG driver. One object owns both so
/// evaluation counting lives with the problem, not the driver.
pub(crate) trait CgObjective<F: Float> {
    fn objective(&mut self, w: &[F]) -> Result<F>;
    fn gradient(&mut self, w: &[F]) -> Result<Vec<F>>;
}

/// Polak-Ribiere+ coefficient `max(0, g1 . (g1 - g0) / ||g0||^2)`; zero when
/// the previous gradient vanished (steepest-descent restart).
pub(crate) fn pr_plus_beta<F: Float>(g_new: &[F], g_old: &[F]) -> F {
    let denom = norm_sq(g_old);
    if denom == F::zero() {
        return F::zero();
    }
    let num = dot(g_new, g_new) - dot(g_new, g_old);
    (num / denom).max(F::zero())
}

fn cg_trial<F: Float>(w: &[F], d: &[F], s: F) -> Vec<F> {
    w.iter().zip(d).map(|(&wi, &di)| wi + s * di).collect()
}

/// Armijo backtracking from `s = 1`, halving up to `max_halvings` times.
/// Returns the accepted `(step, value)`, or `None` when every trial fails —
/// on a nonsmooth objective the subgradient direction can be unusable at a
/// kink, which is a termination signal rather than an error.
fn cg_backtrack<F: Float>(
    problem: &mut dyn CgObjective<F>,
    w: &[F],
    d: &[F],
    f0: F,
    slope: F,
    c1: F,
    max_halvings: usize,
) -> Result<Option<(F, F)>> {
    let mut s = F::one();
    for _ in 0..=max_halvings {
        let f1 = problem.objective(&cg_trial(w, d, s))?;
        if f1.is_finite() && f1 <= f0 + c1 * s * slope {
            return Ok(Some((s, f1)));
        }
        s = s * cast::<F>(0.5);
    }
    Ok(None)
}

/// Nonlinear CG driver: direction `d <- -g + beta d_prev`, Armijo backtracking
/// from `s = 1`, then one quadratic-interpolation refinement fitted to
/// `(f(0), f'(0), f(s))` — taken only when it also satisfies Armijo and
/// improves. On a quadratic objective the refinement recovers the exact
/// minimizer along `d`, so CG terminates finitely there. A stalled line
/// search triggers one steepest-descent restart; if even `-g` makes no
/// progress (a hinge kink), the driver stops at the current iterate.
pub(crate) fn cg_driver<F: Float>(
    mut w: Vec<F>,
    problem: &mut dyn CgObjective<F>,
    max_iters: usize,
    grad_tol: Option<F>,
    c1: F,
    max_halvings: usize,
) -> Result<(Vec<F>, u64)> {
    let mut iterations = 0u64;
    let mut g = problem.gradient(&w)?;
    let mut d: Vec<F> = g.iter().map(|&v| -v).collect();
    'outer: for t in 0..max_iters {
        if norm_inf(&g) <= grad_tol.unwrap_or(F::zero()) {
            break;
        }
        let mut slope = dot(&g, &d);
        let mut on_steepest = false;
        if slope >= F::zero() {
            // The conjugate direction turned uphill: restart on -g.
            d = g.iter().map(|&v| -v).collect();
            slope = -norm_sq(&g);
            on_steepest = true;
            if slope == F::zero() {
                break;
            }
        }
        let f0 = problem.objective(&w)?;
        let (mut s_acc, f_acc) = loop {
            match cg_backtrack(problem, &w, &d, f0, slope, c1, max_halvings)? {
                Some(pair) => break pair,
                None if !on_steepest => {
                    d = g.iter().map(|&v| -v).collect();
                    slope = -norm_sq(&g);
                    on_steepest = true;
                    if slope == F::zero() {
                        break 'outer;
                    }
                }
                None => break 'outer,
            }
        };
        // Quadratic fit through f(0), f'(0), f(s_acc).
        let denom = cast::<F>(2.0) * (f_acc - f0 - slope * s_acc);
        if denom > F::zero() {
            let s_fit = -slope * s_acc * s_acc / denom;
            if s_fit > F::zero() && s_fit.is_finite() {
                let f_fit = problem.objective(&cg_trial(&w, &d, s_fit))?;
                if f_fit < f_acc && f_fit <= f0 + c1 * s_fit * slope {
                    s_acc = s_fit;
                }
            }
        }
        w = cg_trial(&w, &d, s_acc);
        check_finite(&w, t)?;
        iterations += 1;
        let g_new = problem.gradient(&w)?;
        let beta = pr_plus_beta(&g_new, &g);
        for (di, &gi) in d.iter_mut().zip(&g_new) {
            *di = -gi + beta * *di;
        }
        g = g_new;
    }
    Ok((w, iterations))
}

struct HingeCgProblem<'a, F: Float> {
    data: &'a Dataset<F>,
    lambda: F,
    report: &'a mut SolveReport<F>,
}

impl<F: Float> CgObjective<F> for HingeCgProblem<'_, F> {
    fn objective(&mut self, w: &[F]) -> Result<F> {
        let v = hinge_objective(self.data, w, self.lambda)?;
        self.report.count_data_pass(EvalKind::Objective);
        Ok(v)
    }

    fn gradient(&mut self, w: &[F]) -> Result<Vec<F>> {
        let g = hinge_subgradient(self.data, w, self.lambda, None)?;
        self.report.count_data_pass(EvalKind::Gradient);
        Ok(g)
    }
}

/// Polak-Ribiere+ CG on the hinge objective, with the subgradient standing in
/// for the gradient. `BaselineMethod::Cg` minimizes the plain mean hinge
/// (`lambda` ignored); `BaselineMethod::CgL2` adds `lambda/2 ||w||^2`.
pub fn cg_polak_ribiere_plus<F: Float>(
    data: &Dataset<F>,
    config: &BaselineConfig<F>,
) -> Result<(Vec<F>, SolveReport<F>)> {
    config.validate()?;
    let lambda_eff = match config.method {
        BaselineMethod::CgL2 => config.lambda,
        _ => F::zero(),
    };
    let start = std::time::Instant::now();
    let mut report = SolveReport::new();
    let w0 = config.initial_w(data.n_features())?;
    let (w, iterations) = {
        let mut problem = HingeCgProblem {
            data,
            lambda: lambda_eff,
            report: &mut report,
        };
        cg_driver(
            w0,
            &mut problem,
            config.max_iters,
            config.grad_tol,
            config.c1,
            config.armijo_max_halvings,
        )?
    };
    report.iterations = iterations;
    finish_report(data, &w, lambda_eff, &mut report, start)?;
    Ok((w, report))
}

/// Runs the baseline named by `config.method`.
pub fn run_baseline<F: Float>(
    data: &Dataset<F>,
    config: &BaselineConfig<F>,
) -> Result<(Vec<F>, SolveReport<F>)> {
    match config.method {
        BaselineMethod::Subgrad => subgradient_descent(data, config),
        BaselineMethod::Sgd => sgd(data, config),
        BaselineMethod::Cg | BaselineMethod::CgL2 => cg_polak_ribiere_plus(data, config),
    }
}
