//! Hyperparameters for the smoothed-SVM solver.

use crate::error::{Error, Result};
use crate::scalar::{cast, Float};

/// Default initial smoothing parameter.
pub const DEFAULT_EPS0: f64 = 1.0;
/// Default smallest smoothing parameter of the continuation schedule.
pub const DEFAULT_EPS_MIN: f64 = 1e-3;
/// Default smoothing reduction factor.
pub const DEFAULT_BETA: f64 = 2.0;
/// Default Armijo sufficient-decrease constant.
pub const DEFAULT_C1: f64 = 1e-4;
/// Default divisor in the per-epsilon Newton convergence test `|d.g~| < eps/factor`.
pub const DEFAULT_NEWTON_TOL_FACTOR: f64 = 10.0;
/// Default cap on Newton iterations across the whole continuation schedule.
pub const DEFAULT_MAX_OUTER_ITERS: usize = 500;
/// Default cap on Armijo halvings per accepted step.
pub const DEFAULT_ARMIJO_MAX_HALVINGS: usize = 40;
/// Default KKT residual the solver polishes down to before returning.
pub const DEFAULT_KKT_TOL: f64 = 1e-4;

/// Solver configuration: regularization weights plus the smoothing schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams<F> {
    /// l2 regularization weight (`lambda >= 0`; `> 0` keeps Newton systems definite).
    pub lambda: F,
    /// l1 regularization weight (`mu >= 0`; `0` disables the l1 machinery).
    pub mu: F,
    /// Initial smoothing parameter of the continuation schedule.
    pub eps0: F,
    /// Smallest smoothing parameter; the schedule stops once `eps <= eps_min / beta`.
    pub eps_min: F,
    /// Smoothing reduction factor (`> 1`).
    pub beta: F,
    /// Armijo sufficient-decrease constant in `(0, 1)`.
    pub c1: F,
    /// Newton convergence divisor: a step counts as converged for the current
    /// `(eps, active set)` when `|d . g~| < eps / newton_tol_factor`.
    pub newton_tol_factor: F,
    /// Hard cap on Newton steps over the whole schedule.
    pub max_outer_iters: usize,
    /// Hard cap on Armijo halvings within one step.
    pub armijo_max_halvings: usize,
    /// Target KKT residual polished for after the schedule ends; `None`
    /// returns right after the schedule.
    pub kkt_tol: Option<F>,
    /// Seed for any randomized companion steps (splits, synthetic data);
    /// the solver itself is deterministic.
    pub seed: u64,
}

impl<F: Float> Default for HyperParams<F> {
    fn default() -> Self {
        Self {
            lambda: cast(1e-2),
            mu: F::zero(),
            eps0: cast(DEFAULT_EPS0),
            eps_min: cast(DEFAULT_EPS_MIN),
            beta: cast(DEFAULT_BETA),
            c1: cast(DEFAULT_C1),
            newton_tol_factor: cast(DEFAULT_NEWTON_TOL_FACTOR),
            max_outer_iters: DEFAULT_MAX_OUTER_ITERS,
            armijo_max_halvings: DEFAULT_ARMIJO_MAX_HALVINGS,
            kkt_tol: Some(cast(DEFAULT_KKT_TOL)),
            seed: 0,
        }
    }
}

impl<F: Float> HyperParams<F> {
    /// Defaults with the two regularization weights filled in.
    pub fn new(lambda: F, mu: F) -> Self {
        Self {
            lambda,
            mu,
            ..Self::default()
        }
    }

    /// Sets the l2 weight.
    pub fn with_lambda(mut self, lambda: F) -> Self {
        self.lambda = lambda;
        self
    }

    /// Sets the l1 weight.
    pub fn with_mu(mut self, mu: F) -> Self {
        self.mu = mu;
        self
    }

    /// Sets the smoothing schedule `eps0 -> eps_min` with reduction factor `beta`.
    pub fn with_eps_schedule(mut self, eps0: F, eps_min: F, beta: F) -> Self {
        self.eps0 = eps0;
        self.eps_min = eps_min;
        self.beta = beta;
        self
    }

    /// Sets the Newton convergence divisor.
    pub fn with_newton_tol_factor(mut self, factor: F) -> Self {
        self.newton_tol_factor = factor;
        self
    }

    /// Sets the final KKT polish target (`None` disables polishing).
    pub fn with_kkt_tol(mut self, tol: Option<F>) -> Self {
        self.kkt_tol = tol;
        self
    }

    /// Sets the seed recorded for companion randomized steps.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks ranges and finiteness of every field.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam { msg });
        if !(self.lambda >= F::zero() && self.lambda.is_finite()) {
            return bad(format!("lambda must be finite and >= 0, got {}", self.lambda));
        }
        if !(self.mu >= F::zero() && self.mu.is_finite()) {
            return bad(format!("mu must be finite and >= 0, got {}", self.mu));
        }
        if !(self.eps0 > F::zero() && self.eps0.is_finite()) {
            return bad(format!("eps0 must be finite and > 0, got {}", self.eps0));
        }
        if !(self.eps_min > F::zero() && self.eps_min <= self.eps0) {
            return bad(format!(
                "eps_min must satisfy 0 < eps_min <= eps0, got {}",
                self.eps_min
            ));
        }
        if !(self.beta > F::one() && self.beta.is_finite()) {
            return bad(format!("beta must be finite and > 1, got {}", self.beta));
        }
        if !(self.c1 > F::zero() && self.c1 < F::one()) {
            return bad(format!("c1 must lie in (0, 1), got {}", self.c1));
        }
        if !(self.newton_tol_factor > F::zero() && self.newton_tol_factor.is_finite()) {
            return bad(format!(
                "newton_tol_factor must be finite and > 0, got {}",
                self.newton_tol_factor
            ));
        }
        if self.max_outer_iters == 0 {
            return bad("max_outer_iters must be at least 1".into());
        }
        if self.armijo_max_halvings == 0 {
            return bad("armijo_max_halvings must be at least 1".into());
        }
        if let Some(tol) = self.kkt_tol {
            if !(tol > F::zero()) {
                return bad(format!("kkt_tol must be > 0 when set, got {tol}"));
            }
        }
        Ok(())
    }
}
