//! Smoothed hinge loss and the regularized training objective.
//!
//! The hinge `max(0, u)` is replaced by `psi_eps(u) = (u + sqrt(eps^2 + u^2)) / 2`,
//! which is strictly convex, twice differentiable for `eps > 0`, sits within
//! `eps/2` above the hinge, and recovers it exactly at `eps = 0`. Margins are
//! `u_i = 1 - y_i * (x_i . w)`, so the per-sample loss is `psi_eps(u_i)`.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{norm_l1, norm_sq, SymMatrix};
use crate::report::{EvalKind, SolveReport};
use crate::scalar::{cast, Float};

/// Smoothed hinge `psi_eps(u)`; `eps = 0` gives the exact hinge `max(0, u)`.
pub fn smoothed_hinge<F: Float>(u: F, eps: F) -> F {
    debug_assert!(eps >= F::zero(), "eps must be nonnegative");
    if eps == F::zero() {
        return u.max(F::zero());
    }
    let half = cast::<F>(0.5);
    half * (u + (eps * eps + u * u).sqrt())
}

/// First derivative of the smoothed hinge: `(1 + u / sqrt(eps^2 + u^2)) / 2`,
/// strictly inside `(0, 1)`. Requires `eps > 0`.
pub fn smoothed_hinge_d1<F: Float>(u: F, eps: F) -> F {
    assert!(eps > F::zero(), "smoothed_hinge_d1 requires eps > 0");
    let half = cast::<F>(0.5);
    half * (F::one() + u / (eps * eps + u * u).sqrt())
}

/// Second derivative of the smoothed hinge: `eps^2 / (2 (eps^2 + u^2)^{3/2})`,
/// positive everywhere with maximum `1 / (2 eps)` at `u = 0`. Requires `eps > 0`.
pub fn smoothed_hinge_d2<F: Float>(u: F, eps: F) -> F {
    assert!(eps > F::zero(), "smoothed_hinge_d2 requires eps > 0");
    let t = eps * eps + u * u;
    eps * eps / (cast::<F>(2.0) * t * t.sqrt())
}

fn check_dims<F: Float>(data: &Dataset<F>, w: &[F], what: &'static str) -> Result<()> {
    if w.len() != data.n_features() {
        return Err(Error::DimensionMismatch {
            what,
            expected: data.n_features(),
            got: w.len(),
        });
    }
    if data.n_samples() == 0 {
        return Err(Error::InvalidData {
            msg: "dataset has no samples".into(),
        });
    }
    Ok(())
}

/// Margins `u_i = 1 - y_i * (x_i . w)` for every sample, in row order.
pub fn margins<F: Float>(data: &Dataset<F>, w: &[F]) -> Result<Vec<F>> {
    check_dims(data, w, "margins weights")?;
    Ok(data
        .rows()
        .iter()
        .zip(data.labels())
        .map(|(row, &y)| F::one() - y * row.dot(w))
        .collect())
}

fn smooth_objective_value<F: Float>(data: &Dataset<F>, w: &[F], lambda: F, eps: F) -> Result<F> {
    check_dims(data, w, "objective weights")?;
    let half = cast::<F>(0.5);
    let n = F::from(data.n_samples()).unwrap();
    let mut loss = F::zero();
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        let u = F::one() - y * row.dot(w);
        loss += smoothed_hinge(u, eps);
    }
    Ok(half * lambda * norm_sq(w) + loss / n)
}

/// Smooth part of the objective: `lambda/2 ||w||_2^2 + mean_i psi_eps(u_i)`.
///
/// Counts one objective evaluation (one data pass).
pub fn objective_smooth<F: Float>(
    data: &Dataset<F>,
    w: &[F],
    lambda: F,
    eps: F,
    report: &mut SolveReport<F>,
) -> Result<F> {
    let v = smooth_objective_value(data, w, lambda, eps)?;
    report.count_data_pass(EvalKind::Objective);
    Ok(v)
}

/// Full penalized objective: smooth part plus `mu ||w||_1`.
///
/// Counts one objective evaluation (one data pass).
pub fn objective_penalized<F: Float>(
    data: &Dataset<F>,
    w: &[F],
    lambda: F,
    mu: F,
    eps: F,
    report: &mut SolveReport<F>,
) -> Result<F> {
    let v = smooth_objective_value(data, w, lambda, eps)?;
    report.count_data_pass(EvalKind::Objective);
    Ok(v + mu * norm_l1(w))
}

/// Gradient of the smooth objective:
/// `lambda w - (1/n) sum_i psi_eps'(u_i) y_i x_i`.
///
/// Counts one gradient evaluation (one data pass). Samples are accumulated in
/// row order, so results are bitwise reproducible.
pub fn gradient_smooth<F: Float>(
    data: &Dataset<F>,
    w: &[F],
    lambda: F,
    eps: F,
    report: &mut SolveReport<F>,
) -> Result<Vec<F>> {
    check_dims(data, w, "gradient weights")?;
    let n = F::from(data.n_samples()).unwrap();
    let mut g: Vec<F> = w.iter().map(|&wi| lambda * wi).collect();
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        let u = F::one() - y * row.dot(w);
        let coef = -smoothed_hinge_d1(u, eps) * y / n;
        for (i, v) in row.iter() {
            g[i] += coef * v;
        }
    }
    report.count_data_pass(EvalKind::Gradient);
    Ok(g)
}

/// Hessian of the smooth objective restricted to the `active` columns:
/// `lambda I + (1/n) X_A' diag(psi_eps''(u_i)) X_A`.
///
/// `active` must be strictly ascending positions in `[0, m)`. The full `m x m`
/// matrix is never formed. Counts one Hessian evaluation (one data pass).
pub fn hessian_active<F: Float>(
    data: &Dataset<F>,
    w: &[F],
    lambda: F,
    eps: F,
    active: &[usize],
    report: &mut SolveReport<F>,
) -> Result<SymMatrix<F>> {
    check_dims(data, w, "hessian weights")?;
    let m = data.n_features();
    if active.windows(2).any(|p| p[0] >= p[1]) || active.last().is_some_and(|&a| a >= m) {
        return Err(Error::InvalidParam {
            msg: "active set must be strictly ascending positions below n_features".into(),
        });
    }
    // Map feature index -> position inside the active block.
    let mut pos = vec![usize::MAX; m];
    for (k, &a) in active.iter().enumerate() {
        pos[a] = k;
    }
    let n = F::from(data.n_samples()).unwrap();
    let mut h = SymMatrix::zeros(active.len());
    let mut gathered: Vec<(usize, F)> = Vec::new();
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        let u = F::one() - y * row.dot(w);
        let coef = smoothed_hinge_d2(u, eps) / n;
        if coef == F::zero() {
            continue;
        }
        gathered.clear();
        for (i, v) in row.iter() {
            if pos[i] != usize::MAX {
                gathered.push((pos[i], v));
            }
        }
        for (a, &(ka, va)) in gathered.iter().enumerate() {
            for &(kb, vb) in gathered.iter().skip(a) {
                h.add_sym(ka, kb, coef * va * vb);
            }
        }
    }
    h.add_diagonal(lambda);
    report.count_data_pass(EvalKind::Hessian);
    Ok(h)
}
