//! Active-set Newton solver with smoothing continuation.
//!
//! The penalized objective `f(w) = lambda/2 ||w||^2 + mean_i psi_eps(u_i) + mu ||w||_1`
//! is minimized by damped Newton steps restricted to an active block
//! `A = support(w) u J`, where `J` collects zero weights whose gradient
//! magnitude exceeds `mu`. The 1-D step size is chosen by the exact
//! piecewise-quadratic line search, so weights can cross (and land exactly on)
//! zero in a single step; Armijo backtracking on the true objective guards the
//! quadratic model. The smoothing parameter follows a geometric continuation
//! schedule `eps0, eps0/beta, ...` down to `eps_min`, and an optional polish
//! phase afterwards drives the KKT residual below a requested tolerance.
//!
//! The inactive set is represented implicitly: a weight is inactive exactly
//! when it is bitwise zero. Newton systems are solved on the active block
//! only — densely when the block is small, through the matrix-inversion lemma
//! on the (samples x samples) companion system when the block is wider than
//! the sample count.

use std::time::Instant;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, SymMatrix};
use crate::linesearch::{minimize_quadratic_l1, LineSearchProblem, LineSearchResult};
use crate::loss::{gradient_smooth, objective_penalized, smoothed_hinge_d2};
use crate::params::HyperParams;
use crate::report::{EvalKind, SolveReport};
use crate::scalar::{cast, sign, Float};

/// Hard cap on polish rounds after the continuation schedule.
const POLISH_ROUND_CAP: usize = 200;

/// KKT residual of the penalized problem at `w` given the smooth gradient `g`:
/// stationarity error `|g_i + mu sign(w_i)|` on the support, subdifferential
/// excess `max(0, |g_i| - mu)` on the zeros. Zero iff `w` is optimal for the
/// smoothed objective `g` was computed at.
pub fn kkt_residual<F: Float>(w: &[F], g: &[F], mu: F) -> F {
    debug_assert_eq!(w.len(), g.len());
    let mut r = F::zero();
    for (&wi, &gi) in w.iter().zip(g) {
        let e = if wi != F::zero() {
            (gi + mu * sign(wi)).abs()
        } else {
            (gi.abs() - mu).max(F::zero())
        };
        r = r.max(e);
    }
    r
}

/// Zero-weight coordinates whose gradient violates the `mu` threshold; these
/// are the candidates worth activating. Ascending order.
fn activation_scan<F: Float>(w: &[F], g: &[F], mu: F) -> Vec<usize> {
    (0..w.len())
        .filter(|&i| w[i] == F::zero() && g[i].abs() > mu)
        .collect()
}

/// The activation candidate with the largest gradient magnitude, if any.
fn strongest_violator<F: Float>(candidates: &[usize], g: &[F]) -> Option<usize> {
    candidates
        .iter()
        .copied()
        .reduce(|best, j| if g[j].abs() > g[best].abs() { j } else { best })
}

/// `support(w) u j_set`, ascending. The two parts are disjoint because every
/// member of `j_set` has a bitwise-zero weight.
fn active_union<F: Float>(w: &[F], j_set: &[usize]) -> Vec<usize> {
    let mut mark = vec![false; w.len()];
    for &j in j_set {
        debug_assert_eq!(w[j], F::zero(), "activation candidates must sit at zero");
        mark[j] = true;
    }
    (0..w.len())
        .filter(|&i| w[i] != F::zero() || mark[i])
        .collect()
}

/// Reduced gradient on the active block: `g_i + mu sign(w_i)` on the support,
/// and the minimum-norm subgradient `g_j - mu sign(g_j)` on activation
/// candidates (which sit at zero with `|g_j| > mu`).
fn reduced_gradient<F: Float>(w: &[F], g: &[F], mu: F, active: &[usize]) -> Vec<F> {
    active
        .iter()
        .map(|&i| {
            if w[i] != F::zero() {
                g[i] + mu * sign(w[i])
            } else {
                g[i] - mu * sign(g[i])
            }
        })
        .collect()
}

fn sparse_dot_sparse<F: Float>(a: &[(u32, F)], b: &[(u32, F)]) -> F {
    let mut acc = F::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

fn sparse_dot_dense<F: Float>(a: &[(u32, F)], d: &[F]) -> F {
    a.iter().map(|&(p, v)| v * d[p as usize]).sum()
}

/// Quadratic model of the smooth objective on the active block:
/// `H = lambda I + sum_i c_i r_i r_i'` with `c_i = psi_eps''(u_i) / n` and
/// `r_i` the i-th sample restricted to the active coordinates. Rows with zero
/// curvature or no active entries are dropped at construction.
struct ActiveModel<F> {
    dim: usize,
    lambda: F,
    /// `(c_i, r_i)` pairs; positions inside each row are strictly ascending.
    terms: Vec<(F, Vec<(u32, F)>)>,
}

impl<F: Float> ActiveModel<F> {
    /// Gathers curvature terms in one data pass (counted as a Hessian
    /// evaluation). `active` must be strictly ascending.
    fn build(
        data: &Dataset<F>,
        w: &[F],
        lambda: F,
        eps: F,
        active: &[usize],
        report: &mut SolveReport<F>,
    ) -> Self {
        let mut pos = vec![u32::MAX; data.n_features()];
        for (k, &a) in active.iter().enumerate() {
            pos[a] = k as u32;
        }
        let n = F::from(data.n_samples()).expect("sample count fits the scalar type");
        let mut terms = Vec::new();
        for (row, &y) in data.rows().iter().zip(data.labels()) {
            let u = F::one() - y * row.dot(w);
            let coef = smoothed_hinge_d2(u, eps) / n;
            if coef == F::zero() {
                continue;
            }
            let r: Vec<(u32, F)> = row
                .iter()
                .filter(|&(i, _)| pos[i] != u32::MAX)
                .map(|(i, v)| (pos[i], v))
                .collect();
            if !r.is_empty() {
                terms.push((coef, r));
            }
        }
        report.count_data_pass(EvalKind::Hessian);
        Self {
            dim: active.len(),
            lambda,
            terms,
        }
    }

    /// Same model restricted to the kept positions (ascending, into the old
    /// block). No data pass: the gathered terms are filtered in memory.
    fn restrict(&self, keep: &[usize]) -> Self {
        let mut newpos = vec![u32::MAX; self.dim];
        for (k, &old) in keep.iter().enumerate() {
            newpos[old] = k as u32;
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(coef, r)| {
                let nr: Vec<(u32, F)> = r
                    .iter()
                    .filter(|&&(p, _)| newpos[p as usize] != u32::MAX)
                    .map(|&(p, v)| (newpos[p as usize], v))
                    .collect();
                (!nr.is_empty()).then_some((*coef, nr))
            })
            .collect();
        Self {
            dim: keep.len(),
            lambda: self.lambda,
            terms,
        }
    }

    /// `d' H d / 2`, computed from the low-rank terms without forming `H`.
    fn half_curvature(&self, d: &[F]) -> F {
        let mut q = self.lambda * norm_sq(d);
        for (coef, r) in &self.terms {
            let t = sparse_dot_dense(r, d);
            q += *coef * t * t;
        }
        q * cast::<F>(0.5)
    }

    fn dense(&self) -> SymMatrix<F> {
        let mut h = SymMatrix::zeros(self.dim);
        for (coef, r) in &self.terms {
            for (a, &(ka, va)) in r.iter().enumerate() {
                for &(kb, vb) in &r[a..] {
                    h.add_sym(ka as usize, kb as usize, *coef * va * vb);
                }
            }
        }
        h.add_diagonal(self.lambda);
        h
    }

    /// Solves `(lambda I + C' C) x = rhs` through the companion system
    /// `(lambda I + C C') z = C rhs`, `x = (rhs - C' z) / lambda`, where the
    /// rows of `C` are `sqrt(c_i) r_i`. Requires `lambda > 0`; the companion
    /// block is (kept samples x kept samples) instead of (dim x dim).
    fn companion_solve(&self, rhs: &[F]) -> Result<Vec<F>> {
        let k = self.terms.len();
        let sq: Vec<F> = self.terms.iter().map(|(c, _)| c.sqrt()).collect();
        let mut kmat = SymMatrix::zeros(k);
        for i in 0..k {
            for j in i..k {
                let v = sq[i] * sq[j] * sparse_dot_sparse(&self.terms[i].1, &self.terms[j].1);
                kmat.set_sym(i, j, v);
            }
        }
        kmat.add_diagonal(self.lambda);
        let t: Vec<F> = (0..k)
            .map(|i| sq[i] * sparse_dot_dense(&self.terms[i].1, rhs))
            .collect();
        let z = kmat.cholesky_solve(&t)?;
        let mut x = rhs.to_vec();
        for i in 0..k {
            let c = sq[i] * z[i];
            for &(p, v) in &self.terms[i].1 {
                x[p as usize] -= c * v;
            }
        }
        for xi in &mut x {
            *xi /= self.lambda;
        }
        Ok(x)
    }

    /// Newton direction `d = -H^{-1} g~`, dispatching on block shape: dense
    /// Cholesky when the block is no wider than the curvature term count (or
    /// `lambda = 0` forbids the companion form), companion solve otherwise.
    fn newton_direction(&self, gt: &[F]) -> Result<Vec<F>> {
        let rhs: Vec<F> = gt.iter().map(|&v| -v).collect();
        if self.dim <= self.terms.len() || self.lambda == F::zero() {
            self.dense().cholesky_solve(&rhs)
        } else {
            self.companion_solve(&rhs)
        }
    }
}

enum StepOutcome {
    /// `|d . g~|` fell under the threshold (or nothing is active).
    Converged,
    /// One damped Newton step was accepted.
    Stepped,
}

enum InnerEnd {
    Converged,
    /// The global Newton-step budget ran out before convergence.
    Budget,
}

struct Solver<'a, F> {
    data: &'a Dataset<F>,
    params: &'a HyperParams<F>,
    w: Vec<F>,
    /// Activation candidates: zero weights being pushed off zero. Sorted,
    /// always a subset of the implicit inactive set `{i : w_i = 0}`.
    j_set: Vec<usize>,
    eps: F,
    phase: u32,
    report: SolveReport<F>,
}

impl<'a, F: Float> Solver<'a, F> {
    fn run(mut self) -> Result<(Vec<F>, SolveReport<F>)> {
        let start = Instant::now();
        let p = self.params;
        let f0 = objective_penalized(self.data, &self.w, p.lambda, p.mu, self.eps, &mut self.report)?;
        self.report.push_trace(f0, self.eps, self.phase, 0);

        let g = gradient_smooth(self.data, &self.w, p.lambda, self.eps, &mut self.report)?;
        self.j_set = activation_scan(&self.w, &g, p.mu);

        // Each pass below runs Newton to tolerance, then either refreshes the
        // activation candidates or shrinks eps; it cannot spin without
        // progress, so the cap is pure insurance.
        let outer_cap = 4 * p.max_outer_iters + 64;
        let budget_exhausted = |r: &SolveReport<F>| Error::NumericalFailure {
            iter: r.iterations as usize,
            msg: format!(
                "Newton budget of {} steps exhausted during continuation",
                p.max_outer_iters
            ),
        };
        let mut schedule_done = false;
        for _ in 0..outer_cap {
            let threshold = self.eps / p.newton_tol_factor;
            let steps_before = self.report.iterations;
            match self.inner_solve(threshold)? {
                InnerEnd::Converged => {}
                InnerEnd::Budget => return Err(budget_exhausted(&self.report)),
            }
            let progressed = self.report.iterations > steps_before;
            let g = gradient_smooth(self.data, &self.w, p.lambda, self.eps, &mut self.report)?;
            let j_new = activation_scan(&self.w, &g, p.mu);
            let mut advance_schedule = j_new == self.j_set;
            if !advance_schedule {
                if progressed {
                    self.j_set = j_new;
                } else {
                    // The iterate did not move, so this scan re-proposes
                    // candidates Newton just rejected; re-running the inner
                    // loop would repeat the exact same cycle. Break it with a
                    // first-order step on the strongest violator alone
                    // (blanket activation would explode the support, and an
                    // extra nonzero can only leave again one breakpoint
                    // landing per step), or advance eps if even that is stuck.
                    if self.report.iterations as usize >= p.max_outer_iters {
                        return Err(budget_exhausted(&self.report));
                    }
                    match strongest_violator(&j_new, &g) {
                        None => advance_schedule = true,
                        Some(top) => {
                            self.j_set = vec![top];
                            match self.fallback_step()? {
                                StepOutcome::Stepped => {}
                                StepOutcome::Converged => advance_schedule = true,
                            }
                        }
                    }
                }
            }
            if advance_schedule {
                if self.eps <= p.eps_min {
                    schedule_done = true;
                    break;
                }
                self.eps /= p.beta;
                self.phase += 1;
            }
        }
        if !schedule_done {
            return Err(Error::NumericalFailure {
                iter: self.report.iterations as usize,
                msg: "continuation loop exceeded its iteration cap".into(),
            });
        }

        if let Some(tol) = p.kkt_tol {
            self.polish(tol)?;
        }

        let g = gradient_smooth(self.data, &self.w, p.lambda, self.eps, &mut self.report)?;
        self.report.final_kkt = kkt_residual(&self.w, &g, p.mu);
        self.report.final_eps = self.eps;
        self.report.final_nnz = self.w.iter().filter(|&&x| x != F::zero()).count();
        self.report.wall_time_s = start.elapsed().as_secs_f64();
        Ok((self.w, self.report))
    }

    /// Newton iterations at the current `(eps, j_set)` until `|d . g~|` drops
    /// below `threshold` or the global step budget is exhausted.
    fn inner_solve(&mut self, threshold: F) -> Result<InnerEnd> {
        loop {
            if self.report.iterations as usize >= self.params.max_outer_iters {
                return Ok(InnerEnd::Budget);
            }
            match self.newton_step(threshold)? {
                StepOutcome::Converged => return Ok(InnerEnd::Converged),
                StepOutcome::Stepped => {}
            }
        }
    }

    /// Best-effort KKT polish at the final smoothing value: alternate
    /// activation rescans with progressively tighter Newton tolerances until
    /// the residual target is met or progress stops (stalls are not errors —
    /// the report carries the honest final residual).
    fn polish(&mut self, tol: F) -> Result<()> {
        let p = self.params;
        let mut threshold = self.eps / p.newton_tol_factor;
        let mut stalled = 0u32;
        for _ in 0..POLISH_ROUND_CAP {
            let g = gradient_smooth(self.data, &self.w, p.lambda, self.eps, &mut self.report)?;
            if kkt_residual(&self.w, &g, p.mu) <= tol {
                return Ok(());
            }
            let j_new = activation_scan(&self.w, &g, p.mu);
            if j_new != self.j_set {
                self.j_set = j_new;
            } else {
                threshold = threshold * cast::<F>(0.01);
                if threshold == F::zero() {
                    return Ok(());
                }
            }
            let steps_before = self.report.iterations;
            match self.inner_solve(threshold) {
                Ok(InnerEnd::Converged) => {}
                Ok(InnerEnd::Budget) => return Ok(()),
                Err(Error::ArmijoStall { .. }) => return Ok(()),
                Err(e) => return Err(e),
            }
            if self.report.iterations > steps_before {
                stalled = 0;
                continue;
            }
            // Newton refused to move; a first-order step on the composite
            // gradient is the remaining way to lower the residual. Activate
            // at most the strongest violator so the support cannot balloon.
            if self.report.iterations as usize >= p.max_outer_iters {
                return Ok(());
            }
            if let Some(top) = strongest_violator(&self.j_set, &g) {
                self.j_set = vec![top];
            }
            match self.fallback_step() {
                Ok(StepOutcome::Stepped) => stalled = 0,
                Ok(StepOutcome::Converged) => {
                    stalled += 1;
                    if stalled >= 3 {
                        return Ok(());
                    }
                }
                Err(Error::ArmijoStall { .. }) => return Ok(()),
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    fn newton_step(&mut self, threshold: F) -> Result<StepOutcome> {
        let p = self.params;
        let iter = self.report.iterations as usize;
        let g = gradient_smooth(self.data, &self.w, p.lambda, self.eps, &mut self.report)?;
        let mut active = active_union(&self.w, &self.j_set);
        if active.is_empty() {
            return Ok(StepOutcome::Converged);
        }
        let mut model =
            ActiveModel::build(self.data, &self.w, p.lambda, self.eps, &active, &mut self.report);
        let mut gt = reduced_gradient(&self.w, &g, p.mu, &active);
        let mut d = model.newton_direction(&gt)?;
        let mut dtg = dot(&d, &gt);
        if dtg.abs() < threshold {
            return Ok(StepOutcome::Converged);
        }
        if dtg > F::zero() {
            return Err(Error::NumericalFailure {
                iter,
                msg: "Newton direction is not a descent direction".into(),
            });
        }

        // Exact line search; a zero step means some activation candidate is
        // pointed the wrong way (its l1 slope dominates), so deactivate those
        // and re-solve on the remaining block — the curvature terms are
        // filtered in memory, not recomputed.
        let ls = loop {
            let w_a: Vec<F> = active.iter().map(|&i| self.w[i]).collect();
            let b: F = active.iter().zip(&d).map(|(&i, &di)| g[i] * di).sum();
            let a = model.half_curvature(&d);
            let problem = LineSearchProblem::new(&w_a, &d, a, b, p.mu);
            let res = minimize_quadratic_l1(&problem)?;
            if res.s_star > F::zero() {
                break res;
            }
            let mut keep = Vec::new();
            let mut dropped = false;
            for (pos, &i) in active.iter().enumerate() {
                let wrong_way =
                    self.w[i] == F::zero() && d[pos] != F::zero() && sign(d[pos]) * g[i] >= F::zero();
                if wrong_way {
                    self.j_set.retain(|&j| j != i);
                    dropped = true;
                } else {
                    keep.push(pos);
                }
            }
            if !dropped {
                return Err(Error::NumericalFailure {
                    iter,
                    msg: "zero line-search step with no deactivation candidate".into(),
                });
            }
            if keep.is_empty() {
                return Ok(StepOutcome::Converged);
            }
            model = model.restrict(&keep);
            gt = keep.iter().map(|&pos| gt[pos]).collect();
            active = keep.iter().map(|&pos| active[pos]).collect();
            d = model.newton_direction(&gt)?;
            dtg = dot(&d, &gt);
            if dtg.abs() < threshold {
                return Ok(StepOutcome::Converged);
            }
            if dtg > F::zero() {
                return Err(Error::NumericalFailure {
                    iter,
                    msg: "Newton direction is not a descent direction after deactivation".into(),
                });
            }
        };

        self.armijo_apply(iter, &active, &d, dtg, &ls)
    }

    /// One safeguarded steepest-descent step on the composite gradient over
    /// `support(w) + J`. Used when the Newton direction keeps rejecting
    /// activation candidates that the first-order scan keeps re-proposing:
    /// along `-g~` every candidate leaves its kink strictly downhill (the
    /// one-sided slope is `-||g~||^2`), so the rejection loop cannot close.
    fn fallback_step(&mut self) -> Result<StepOutcome> {
        let p = self.params;
        let iter = self.report.iterations as usize;
        let g = gradient_smooth(self.data, &self.w, p.lambda, self.eps, &mut self.report)?;
        let active = active_union(&self.w, &self.j_set);
        if active.is_empty() {
            return Ok(StepOutcome::Converged);
        }
        let gt = reduced_gradient(&self.w, &g, p.mu, &active);
        let d: Vec<F> = gt.iter().map(|&v| -v).collect();
        let dtg = dot(&d, &gt);
        if dtg == F::zero() {
            return Ok(StepOutcome::Converged);
        }
        let model =
            ActiveModel::build(self.data, &self.w, p.lambda, self.eps, &active, &mut self.report);
        let a = model.half_curvature(&d);
        let b: F = active.iter().zip(&d).map(|(&i, &di)| g[i] * di).sum();
        let w_a: Vec<F> = active.iter().map(|&i| self.w[i]).collect();
        let problem = LineSearchProblem::new(&w_a, &d, a, b, p.mu);
        let ls = minimize_quadratic_l1(&problem)?;
        if ls.s_star == F::zero() {
            return Ok(StepOutcome::Converged);
        }
        self.armijo_apply(iter, &active, &d, dtg, &ls)
    }

    /// Armijo backtracking on the true penalized objective (slope `d . g~`)
    /// from the exact-line-search step, then all accepted-step bookkeeping:
    /// bitwise zeroing of a breakpoint landing, activation-list upkeep, phase
    /// accounting, and the trace entry.
    fn armijo_apply(
        &mut self,
        iter: usize,
        active: &[usize],
        d: &[F],
        dtg: F,
        ls: &LineSearchResult<F>,
    ) -> Result<StepOutcome> {
        let p = self.params;
        let f0 = objective_penalized(self.data, &self.w, p.lambda, p.mu, self.eps, &mut self.report)?;
        let mut s = ls.s_star;
        let mut halvings = 0usize;
        let (w_new, f_new) = loop {
            let mut wt = self.w.clone();
            for (pos, &i) in active.iter().enumerate() {
                wt[i] = self.w[i] + s * d[pos];
            }
            if s == ls.s_star {
                if let Some(zp) = ls.zero_index {
                    // The step lands exactly on this coordinate's breakpoint:
                    // zero it bitwise so it joins the inactive set cleanly.
                    wt[active[zp]] = F::zero();
                }
            }
            let ft = objective_penalized(self.data, &wt, p.lambda, p.mu, self.eps, &mut self.report)?;
            if !ft.is_finite() {
                return Err(Error::NumericalFailure {
                    iter,
                    msg: format!("objective became non-finite at step size {s}"),
                });
            }
            if ft <= f0 + p.c1 * s * dtg {
                break (wt, ft);
            }
            halvings += 1;
            if halvings > p.armijo_max_halvings {
                return Err(Error::ArmijoStall {
                    iter,
                    halvings: halvings - 1,
                    step: s.to_f64().unwrap_or(f64::NAN),
                    slope: dtg.to_f64().unwrap_or(f64::NAN),
                });
            }
            s = s / cast::<F>(2.0);
        };

        let mut entered = 0u32;
        let mut inactive_changed = false;
        for &i in active {
            let before = self.w[i];
            let after = w_new[i];
            if before != F::zero() && after == F::zero() {
                entered += 1;
                inactive_changed = true;
            } else if before == F::zero() && after != F::zero() {
                inactive_changed = true;
            }
        }
        self.w = w_new;
        // Candidates that moved off zero are no longer activation candidates.
        let w_ref = &self.w;
        self.j_set.retain(|&j| w_ref[j] == F::zero());
        self.report.iterations += 1;
        if inactive_changed {
            self.phase += 1;
        }
        self.report
            .push_trace(f_new, self.eps, self.phase, entered.min(255) as u8);
        Ok(StepOutcome::Stepped)
    }
}

/// Minimizes `lambda/2 ||w||^2 + mean_i psi_eps(u_i) + mu ||w||_1` and returns
/// the weights together with the run's counters and certificates.
///
/// Deterministic: identical inputs produce bitwise-identical outputs. Timing
/// covers only this call. Typical failures are [`Error::ArmijoStall`] (no
/// descent within the halving budget) and [`Error::NumericalFailure`] (step
/// budget exhausted); both indicate the problem, tolerance, or schedule needs
/// revisiting rather than a transient condition.
pub fn svm_smooth<F: Float>(
    data: &Dataset<F>,
    params: &HyperParams<F>,
) -> Result<(Vec<F>, SolveReport<F>)> {
    svm_smooth_from(data, params, None)
}

/// [`svm_smooth`] with an optional warm start. The inactive set is derived
/// from the exact zeros of `w0`; every other coordinate starts active.
pub fn svm_smooth_from<F: Float>(
    data: &Dataset<F>,
    params: &HyperParams<F>,
    w0: Option<&[F]>,
) -> Result<(Vec<F>, SolveReport<F>)> {
    params.validate()?;
    let w = match w0 {
        None => vec![F::zero(); data.n_features()],
        Some(start) => {
            if start.len() != data.n_features() {
                return Err(Error::DimensionMismatch {
                    what: "warm-start weights",
                    expected: data.n_features(),
                    got: start.len(),
                });
            }
            if start.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParam {
                    msg: "warm-start weights must be finite".into(),
                });
            }
            start.to_vec()
        }
    };
    Solver {
        data,
        params,
        w,
        j_set: Vec::new(),
        eps: params.eps0,
        phase: 0,
        report: SolveReport::new(),
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SparseRow;
    use crate::loss::smoothed_hinge;

    fn dense_dataset(rows: &[&[f64]], labels: &[f64]) -> Dataset<f64> {
        let m = rows[0].len();
        let sparse = rows
            .iter()
            .map(|r| {
                SparseRow::new(
                    r.iter()
                        .enumerate()
                        .filter(|(_, &v)| v != 0.0)
                        .map(|(i, &v)| (i as u32, v))
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        Dataset::new(m, sparse, labels.to_vec()).unwrap()
    }

    #[test]
    fn kkt_residual_combines_support_and_zero_terms() {
        // support coord: |-0.75 + 0.25| = 0.5; zeros: max(0, 0.375 - 0.25) = 0.125
        // and max(0, 0.05 - 0.25) = 0. (All values exact in binary64.)
        let r = kkt_residual(&[0.5, 0.0, 0.0], &[-0.75, 0.375, 0.05], 0.25);
        assert_eq!(r, 0.5);
        assert_eq!(kkt_residual(&[0.0], &[0.05], 0.25), 0.0, "interior zero is optimal");
    }

    #[test]
    fn activation_scan_picks_large_gradient_zeros() {
        let j = activation_scan(&[0.0, 1.0, 0.0], &[0.5, 9.0, -0.2], 0.3);
        assert_eq!(j, vec![0], "only zero weights with |g| > mu qualify");
    }

    #[test]
    fn oversized_mu_keeps_all_weights_at_zero() {
        let data = dense_dataset(
            &[&[1.0, 0.5], &[0.8, -0.2], &[-0.9, 0.4], &[-1.1, -0.6]],
            &[1.0, 1.0, -1.0, -1.0],
        );
        // mu just above ||mean_i y_i x_i||_inf dominates every data gradient.
        let n = data.n_samples() as f64;
        let mut mean = [0.0f64; 2];
        for (row, &y) in data.rows().iter().zip(data.labels()) {
            for (i, v) in row.iter() {
                mean[i] += y * v / n;
            }
        }
        let mu = 1.01 * mean.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let params = HyperParams::new(1e-2, mu);
        let (w, report) = svm_smooth(&data, &params).unwrap();
        assert!(w.iter().all(|&x| x == 0.0), "w must stay exactly zero, got {w:?}");
        assert_eq!(report.final_nnz, 0);
        assert_eq!(report.final_kkt, 0.0, "zero is interior to the subdifferential");
    }

    #[test]
    fn one_dimensional_problem_matches_grid_oracle() {
        // Two mirrored samples collapse the objective to
        // f(w) = w^2/2 + psi_eps(1 - w) at fixed eps = 0.1.
        let data = dense_dataset(&[&[1.0], &[-1.0]], &[1.0, -1.0]);
        let params = HyperParams::new(1.0, 0.0)
            .with_eps_schedule(0.1, 0.1, 2.0)
            .with_newton_tol_factor(1e12)
            .with_kkt_tol(Some(1e-6));
        let (w, report) = svm_smooth(&data, &params).unwrap();
        assert!(report.final_kkt <= 1e-6, "kkt = {}", report.final_kkt);

        let f = |w: f64| 0.5 * w * w + smoothed_hinge(1.0 - w, 0.1);
        let mut best = (0.0, f(0.0));
        let steps = 2_000_000;
        for k in 1..=steps {
            let x = k as f64 / steps as f64;
            let v = f(x);
            if v < best.1 {
                best = (x, v);
            }
        }
        assert!(
            (w[0] - best.0).abs() < 2.0 / steps as f64 + 1e-9,
            "solver w = {}, grid argmin = {}",
            w[0],
            best.0
        );
        assert!(f(w[0]) <= best.1 + 1e-12, "solver objective must not exceed the grid minimum");
    }

    #[test]
    fn mu_zero_run_drives_gradient_norm_down() {
        let data = dense_dataset(
            &[&[1.0, 0.2], &[0.7, -0.3], &[-0.8, 0.5], &[-1.2, -0.1], &[0.3, 1.0]],
            &[1.0, 1.0, -1.0, -1.0, 1.0],
        );
        let params = HyperParams::new(0.5, 0.0).with_kkt_tol(Some(1e-6));
        let (w, report) = svm_smooth(&data, &params).unwrap();
        let mut probe = SolveReport::new();
        let g = gradient_smooth(&data, &w, 0.5, report.final_eps, &mut probe).unwrap();
        let ginf = g.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!(ginf <= 1e-6, "with mu = 0 the kkt residual is ||g||_inf, got {ginf}");
        assert_eq!(report.final_kkt, ginf);
    }

    #[test]
    fn perturbing_the_solution_raises_the_residual() {
        let data = dense_dataset(
            &[&[1.0, 0.2], &[0.7, -0.3], &[-0.8, 0.5], &[-1.2, -0.1]],
            &[1.0, 1.0, -1.0, -1.0],
        );
        let params = HyperParams::new(0.3, 0.05).with_kkt_tol(Some(1e-6));
        let (w, report) = svm_smooth(&data, &params).unwrap();
        let mut probe = SolveReport::new();
        let support = (0..w.len()).find(|&i| w[i] != 0.0).expect("nonzero solution");
        let mut w_bad = w.clone();
        w_bad[support] += 0.05;
        let g_bad = gradient_smooth(&data, &w_bad, 0.3, report.final_eps, &mut probe).unwrap();
        let kkt_bad = kkt_residual(&w_bad, &g_bad, 0.05);
        assert!(
            kkt_bad > 10.0 * report.final_kkt.max(1e-12),
            "perturbed residual {kkt_bad} must dwarf the converged one {}",
            report.final_kkt
        );
    }

    #[test]
    fn trace_descends_within_each_phase() {
        let data = dense_dataset(
            &[&[1.0, 0.2, -0.1], &[0.7, -0.3, 0.4], &[-0.8, 0.5, 0.2], &[-1.2, -0.1, -0.5]],
            &[1.0, 1.0, -1.0, -1.0],
        );
        let params = HyperParams::new(0.1, 0.05);
        let (_, report) = svm_smooth(&data, &params).unwrap();
        assert!(report.objective_trace.len() > 2, "expect a nontrivial trace");
        for pair in report.objective_trace.windows(2) {
            if pair[0].phase == pair[1].phase {
                assert!(
                    pair[1].objective <= pair[0].objective + 1e-12,
                    "objective rose within phase {}: {} -> {}",
                    pair[0].phase,
                    pair[0].objective,
                    pair[1].objective
                );
            }
            assert!(pair[1].entered_inactive <= 1, "at most one index may enter per step");
        }
    }

    #[test]
    fn companion_solve_matches_dense_cholesky() {
        // Fabricated wide model: 5 coordinates, 2 curvature terms.
        let model = ActiveModel::<f64> {
            dim: 5,
            lambda: 0.7,
            terms: vec![
                (0.9, vec![(0, 1.0), (2, -2.0), (3, 0.5)]),
                (0.4, vec![(1, 1.5), (2, 1.0), (4, -1.0)]),
            ],
        };
        let rhs = [1.0, -2.0, 0.5, 3.0, -0.25];
        let dense = model.dense().cholesky_solve(&rhs).unwrap();
        let fast = model.companion_solve(&rhs).unwrap();
        for (a, b) in dense.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-12, "dense {dense:?} vs companion {fast:?}");
        }
        // Dispatch picks the companion path here (dim 5 > 2 terms, lambda > 0).
        let d = model.newton_direction(&rhs.map(|v| -v)).unwrap();
        for (a, b) in dense.iter().zip(&d) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let data = dense_dataset(&[&[1.0], &[-1.0]], &[1.0, -1.0]);
        let mut params = HyperParams::new(1.0, 0.0);
        params.max_outer_iters = 1;
        let err = svm_smooth(&data, &params).unwrap_err();
        assert!(
            matches!(err, Error::NumericalFailure { .. }),
            "budget exhaustion should surface as a numerical failure, got {err}"
        );
    }

    #[test]
    fn solver_is_deterministic() {
        let data = dense_dataset(
            &[&[1.0, 0.2], &[0.7, -0.3], &[-0.8, 0.5], &[-1.2, -0.1]],
            &[1.0, 1.0, -1.0, -1.0],
        );
        let params = HyperParams::new(0.3, 0.05);
        let (w1, r1) = svm_smooth(&data, &params).unwrap();
        let (w2, r2) = svm_smooth(&data, &params).unwrap();
        assert_eq!(w1, w2, "same inputs must give bitwise-identical weights");
        assert_eq!(r1.iterations, r2.iterations);
        assert_eq!(r1.final_kkt, r2.final_kkt);
    }

    #[test]
    fn warm_start_from_the_solution_converges_immediately() {
        let data = dense_dataset(
            &[&[1.0, 0.2], &[0.7, -0.3], &[-0.8, 0.5], &[-1.2, -0.1]],
            &[1.0, 1.0, -1.0, -1.0],
        );
        // Fixed eps so cold and warm runs optimize the same objective.
        let params = HyperParams::new(0.3, 0.05).with_eps_schedule(0.01, 0.01, 2.0);
        let (w_cold, r_cold) = svm_smooth(&data, &params).unwrap();
        let (w_warm, r_warm) = svm_smooth_from(&data, &params, Some(&w_cold)).unwrap();
        assert_eq!(w_warm, w_cold, "restarting at the optimum must stay put");
        assert!(
            r_warm.iterations < r_cold.iterations.max(1),
            "warm start took {} steps, cold took {}",
            r_warm.iterations,
            r_cold.iterations
        );
        let err = svm_smooth_from(&data, &params, Some(&[0.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }), "{err}");
        let err = svm_smooth_from(&data, &params, Some(&[f64::NAN, 0.0])).unwrap_err();
        assert!(matches!(err, Error::InvalidParam { .. }), "{err}");
    }

    #[test]
    fn l1_path_produces_exact_zeros() {
        // With a meaningful mu, some weights should be bitwise zero (not just
        // small), exercising the breakpoint-landing machinery end to end.
        let data = dense_dataset(
            &[
                &[1.0, 0.05, -0.02, 0.01],
                &[0.9, -0.03, 0.04, -0.02],
                &[-1.1, 0.02, 0.03, 0.015],
                &[-0.95, -0.04, -0.05, -0.01],
            ],
            &[1.0, 1.0, -1.0, -1.0],
        );
        let params = HyperParams::new(0.1, 0.05);
        let (w, report) = svm_smooth(&data, &params).unwrap();
        assert!(w[0] != 0.0, "the informative feature must stay active");
        let zeros = w.iter().filter(|&&x| x == 0.0).count();
        assert!(zeros >= 2, "noise features should be exactly zero, got {w:?}");
        assert_eq!(report.final_nnz, w.len() - zeros);
        assert!(report.final_kkt <= 1e-4, "kkt = {}", report.final_kkt);
    }
}
