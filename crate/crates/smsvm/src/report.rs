//! Run reports: objective traces and honest work counters.
//!
//! Every objective, gradient, or Hessian evaluation sweeps the data once, so
//! each of those counters also bumps `data_passes`. Mini-batch work is
//! accounted fractionally: a batch pass adds a full `grad_evals` tick but only
//! `batch/n` of a data pass (tracked as an exact sample count and floored at
//! read time, so `n/batch` batches add up to precisely one pass).

use crate::scalar::Float;

/// Which evaluation a counted data pass belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalKind {
    /// Objective value.
    Objective,
    /// (Sub)gradient vector.
    Gradient,
    /// Hessian block on the active columns.
    Hessian,
}

/// One accepted solver iterate in the objective trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint<F> {
    /// Penalized objective value at the accepted iterate.
    pub objective: F,
    /// Smoothing parameter in force when the step was accepted.
    pub eps: F,
    /// Phase counter: bumped whenever `eps` changes or the zero set changes,
    /// so equal phases share a fixed `(eps, inactive-set)` pair.
    pub phase: u32,
    /// How many indices entered the zero set on this step (0 or 1).
    pub entered_inactive: u8,
}

/// Counters, timing, and convergence certificates for one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<F> {
    /// Penalized objective at each accepted iterate, with phase bookkeeping.
    pub objective_trace: Vec<TracePoint<F>>,
    /// Objective evaluations.
    pub obj_evals: u64,
    /// (Sub)gradient evaluations (mini-batch evaluations count one each).
    pub grad_evals: u64,
    /// Active-block Hessian evaluations.
    pub hess_evals: u64,
    /// Newton steps (or first-order iterations) actually executed.
    pub iterations: u64,
    /// Wall-clock seconds inside the solver (excludes parsing and setup).
    pub wall_time_s: f64,
    /// KKT residual at the returned iterate, for the final smoothing value.
    pub final_kkt: F,
    /// Smoothing parameter the returned iterate was optimized at.
    pub final_eps: F,
    /// Number of nonzero weights returned.
    pub final_nnz: usize,
    /// Full-data sweeps counted so far.
    full_passes: u64,
    /// Samples touched by mini-batch evaluations (numerator of the
    /// fractional part of `data_passes`).
    batch_samples: u64,
    /// Dataset size the batch samples are measured against; 0 until the
    /// first batch evaluation.
    batch_n: u64,
}

impl<F: Float> Default for SolveReport<F> {
    fn default() -> Self {
        Self {
            objective_trace: Vec::new(),
            obj_evals: 0,
            grad_evals: 0,
            hess_evals: 0,
            iterations: 0,
            wall_time_s: 0.0,
            final_kkt: F::nan(),
            final_eps: F::nan(),
            final_nnz: 0,
            full_passes: 0,
            batch_samples: 0,
            batch_n: 0,
        }
    }
}

impl<F: Float> SolveReport<F> {
    /// Fresh report with zeroed counters.
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts one full-data evaluation of the given kind (one data pass).
    pub fn count_data_pass(&mut self, kind: EvalKind) {
        match kind {
            EvalKind::Objective => self.obj_evals += 1,
            EvalKind::Gradient => self.grad_evals += 1,
            EvalKind::Hessian => self.hess_evals += 1,
        }
        self.full_passes += 1;
    }

    /// Counts one evaluation of `kind` that touched `batch` of `n` samples:
    /// a full counter tick but only `batch/n` of a data pass. A report
    /// describes one run over one dataset, so `n` is expected to be the same
    /// on every call; if it ever changes, the fraction already banked is
    /// rescaled to the new denominator.
    pub fn count_batch_pass(&mut self, kind: EvalKind, batch: usize, n: usize) {
        match kind {
            EvalKind::Objective => self.obj_evals += 1,
            EvalKind::Gradient => self.grad_evals += 1,
            EvalKind::Hessian => self.hess_evals += 1,
        }
        let n = n.max(1) as u64;
        if self.batch_n != n {
            if self.batch_n != 0 {
                self.batch_samples = self.batch_samples * n / self.batch_n;
            }
            self.batch_n = n;
        }
        self.batch_samples += batch as u64;
        // Bank completed sweeps so the numerator stays small.
        self.full_passes += self.batch_samples / n;
        self.batch_samples %= n;
    }

    /// Completed data passes (fractional batch work rounded down).
    pub fn data_passes(&self) -> u64 {
        self.full_passes
    }

    /// Appends an accepted iterate to the objective trace.
    pub fn push_trace(&mut self, objective: F, eps: F, phase: u32, entered_inactive: u8) {
        self.objective_trace.push(TracePoint {
            objective,
            eps,
            phase,
            entered_inactive,
        });
    }

    /// Objective values of the trace, in acceptance order.
    pub fn objective_values(&self) -> impl Iterator<Item = F> + '_ {
        self.objective_trace.iter().map(|t| t.objective)
    }
}
