//! Shared oracles for the acceptance suite: dense grid minimization for the
//! 1-D line search, finite-difference derivatives, and a high-precision
//! proximal-gradient reference solver. Everything here recomputes from first
//! principles so the library is checked against independent arithmetic.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use smsvm::loss::{gradient_smooth, objective_penalized, objective_smooth};
use smsvm::{Dataset, SolveReport, SparseRow};

/// A randomly generated 1-D line-search instance (quadratic plus l1 along a
/// ray), with the evaluation window `[0, s_max]` always finite.
pub struct LsInstance {
    pub w: Vec<f64>,
    pub d: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    /// `None` means "use the problem's own default window".
    pub s_max: Option<f64>,
}

/// Direct evaluation of `j(s) = a s^2 + b s + mu sum_i |w_i + s d_i|`.
pub fn j_direct(inst: &LsInstance, s: f64) -> f64 {
    let l1: f64 = inst
        .w
        .iter()
        .zip(&inst.d)
        .map(|(&wi, &di)| (wi + s * di).abs())
        .sum();
    inst.a * s * s + inst.b * s + inst.mu * l1
}

/// Draws a line-search instance mixing the edge cases that matter: zero
/// weights, zero direction components, deliberately duplicated crossing
/// points, `mu = 0`, `a = 0` flat quadratics, and explicit windows.
pub fn random_ls_instance(rng: &mut ChaCha8Rng) -> LsInstance {
    let m = rng.gen_range(1..=64);
    let mut w: Vec<f64> = (0..m)
        .map(|_| {
            if rng.gen_bool(0.15) {
                0.0
            } else {
                2.0 * rng.sample::<f64, _>(StandardNormal)
            }
        })
        .collect();
    let mut d: Vec<f64> = (0..m)
        .map(|_| {
            if rng.gen_bool(0.15) {
                0.0
            } else {
                rng.sample::<f64, _>(StandardNormal)
            }
        })
        .collect();
    if d.iter().all(|&v| v == 0.0) {
        d[rng.gen_range(0..m)] = 1.0 + rng.gen::<f64>();
    }
    // Force a shared crossing point on a chunk of coordinates so duplicate
    // breakpoints are exercised: sigma_i = -w_i/d_i = sigma for all of them.
    if rng.gen_bool(0.3) {
        let sigma = 0.2 + 2.0 * rng.gen::<f64>();
        for i in 0..m {
            if rng.gen_bool(0.3) && d[i] != 0.0 {
                w[i] = -sigma * d[i];
            }
        }
    }
    let mu = if rng.gen_bool(1.0 / 6.0) {
        0.0
    } else {
        0.3 * rng.sample::<f64, _>(StandardNormal).abs()
    };
    let d_l1: f64 = d.iter().map(|v| v.abs()).sum();
    if rng.gen_bool(0.1) {
        // Flat quadratic: pick b so the terminal slope b + mu ||d||_1 stays
        // positive (otherwise the objective is unbounded below).
        let b = -mu * d_l1 * 0.9 * rng.gen::<f64>() - 0.05;
        let b = if b + mu * d_l1 > 0.0 { b } else { mu * d_l1 * 0.1 + 0.05 };
        return LsInstance {
            w,
            d,
            a: 0.0,
            b,
            mu,
            s_max: Some(1.0 + 4.0 * rng.gen::<f64>()),
        };
    }
    let a = 0.05 + 1.95 * rng.gen::<f64>();
    let b = 2.0 * rng.sample::<f64, _>(StandardNormal);
    let s_max = if rng.gen_bool(0.2) {
        // Clamp below the natural window to exercise boundary minimizers.
        let default = (b.abs() + mu * d_l1) / (2.0 * a);
        Some((default * (0.1 + 0.7 * rng.gen::<f64>())).max(1e-3))
    } else {
        None
    };
    LsInstance { w, d, a, b, mu, s_max }
}

/// Dense grid minimization of `j` over `[0, hi]` with `points` samples.
/// Between crossing points the l1 term is linear, so each segment is entered
/// once with a direct evaluation at its midpoint and then interpolated
/// exactly; the values equal `j_direct` up to roundoff while keeping the
/// sweep `O(points + m log m)`.
pub fn grid_min(inst: &LsInstance, hi: f64, points: usize) -> (f64, f64) {
    assert!(hi.is_finite() && hi >= 0.0 && points >= 2);
    let mut kinks: Vec<f64> = inst
        .w
        .iter()
        .zip(&inst.d)
        .filter_map(|(&wi, &di)| {
            if di == 0.0 {
                return None;
            }
            let s = -wi / di;
            (s > 0.0 && s < hi).then_some(s)
        })
        .collect();
    kinks.sort_by(f64::total_cmp);
    kinks.push(hi.max(1.0) * 2.0); // sentinel past the window

    let step = hi / (points - 1) as f64;
    let mut seg = 0usize; // first kink strictly ahead of the current point
    let mut seg_ready = false;
    let (mut c0, mut c1, mut s_mid) = (0.0, 0.0, 0.0);
    let mut best = (0.0, f64::INFINITY);
    let mut lo = 0.0;
    for k in 0..points {
        let s = if k + 1 == points { hi } else { step * k as f64 };
        while s > kinks[seg] {
            lo = kinks[seg];
            seg += 1;
            seg_ready = false;
        }
        if !seg_ready {
            s_mid = 0.5 * (lo + kinks[seg].min(hi));
            c0 = inst
                .w
                .iter()
                .zip(&inst.d)
                .map(|(&wi, &di)| (wi + s_mid * di).abs())
                .sum();
            c1 = inst
                .w
                .iter()
                .zip(&inst.d)
                .map(|(&wi, &di)| (wi + s_mid * di).signum() * di)
                .sum();
            seg_ready = true;
        }
        let l1 = c0 + c1 * (s - s_mid);
        let j = inst.a * s * s + inst.b * s + inst.mu * l1;
        if j < best.1 {
            best = (s, j);
        }
    }
    best
}

/// Central finite-difference gradient of the smooth objective.
pub fn fd_gradient(data: &Dataset<f64>, w: &[f64], lambda: f64, eps: f64) -> Vec<f64> {
    let mut scratch = SolveReport::new();
    let mut g = vec![0.0; w.len()];
    for i in 0..w.len() {
        let h = 1e-5 * (1.0 + w[i].abs());
        let mut wp = w.to_vec();
        wp[i] += h;
        let fp = objective_smooth(data, &wp, lambda, eps, &mut scratch).unwrap();
        wp[i] = w[i] - h;
        let fm = objective_smooth(data, &wp, lambda, eps, &mut scratch).unwrap();
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central finite-difference Hessian: differentiate the analytic gradient.
pub fn fd_hessian(data: &Dataset<f64>, w: &[f64], lambda: f64, eps: f64) -> Vec<Vec<f64>> {
    let m = w.len();
    let mut scratch = SolveReport::new();
    let mut h_mat = vec![vec![0.0; m]; m];
    for j in 0..m {
        let h = 1e-5 * (1.0 + w[j].abs());
        let mut wp = w.to_vec();
        wp[j] += h;
        let gp = gradient_smooth(data, &wp, lambda, eps, &mut scratch).unwrap();
        wp[j] = w[j] - h;
        let gm = gradient_smooth(data, &wp, lambda, eps, &mut scratch).unwrap();
        for i in 0..m {
            h_mat[i][j] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    h_mat
}

/// Soft-thresholding, the proximal map of `t ||.||_1`.
fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// High-precision reference minimizer of the penalized smoothed objective at
/// a fixed `eps`: accelerated proximal gradient with function-value restarts,
/// stopped on the proximal-gradient-map norm. Independent of the Newton
/// solver (first-order method, dense iterates); returns `(w, objective)`.
pub fn prox_grad_oracle(
    data: &Dataset<f64>,
    lambda: f64,
    mu: f64,
    eps: f64,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let m = data.n_features();
    let n = data.n_samples() as f64;
    // Lipschitz bound: lambda + max psi'' * mean row norm^2, psi'' <= 1/(2 eps).
    let mean_sq: f64 = data
        .rows()
        .iter()
        .map(|r| r.values().iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / n;
    let lip = lambda + mean_sq / (2.0 * eps);
    let step = 1.0 / lip;
    let mut scratch = SolveReport::new();

    let mut w = vec![0.0; m];
    let mut y = w.clone();
    let mut t = 1.0f64;
    let mut f_prev = f64::INFINITY;
    for _ in 0..max_iters {
        let g = gradient_smooth(data, &y, lambda, eps, &mut scratch).unwrap();
        let w_new: Vec<f64> = y
            .iter()
            .zip(&g)
            .map(|(&yi, &gi)| soft_threshold(yi - step * gi, step * mu))
            .collect();
        let f_new = objective_penalized(data, &w_new, lambda, mu, eps, &mut scratch).unwrap();
        if f_new > f_prev {
            // Momentum overshot: restart acceleration at the last iterate.
            y = w.clone();
            t = 1.0;
            f_prev = f64::INFINITY;
            continue;
        }
        // Gradient-map stationarity at the accepted point.
        let gap = w_new
            .iter()
            .zip(&w)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        y = w_new
            .iter()
            .zip(&w)
            .map(|(&new, &old)| new + beta * (new - old))
            .collect();
        w = w_new;
        t = t_new;
        if gap <= 1e-13 * (1.0 + w.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
        f_prev = f_new;
    }
    let f = objective_penalized(data, &w, lambda, mu, eps, &mut scratch).unwrap();
    (w, f)
}

/// Dense random classification dataset with labels correlated to a planted
/// direction, for derivative and optimality spot checks.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Dataset<f64> {
    let planted: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let score: f64 = x.iter().zip(&planted).map(|(a, b)| a * b).sum();
        let noise: f64 = rng.sample::<f64, _>(StandardNormal);
        labels.push(if score + noise >= 0.0 { 1.0 } else { -1.0 });
        rows.push(SparseRow::new(x.into_iter().enumerate().map(|(i, v)| (i as u32, v)).collect()).unwrap());
    }
    Dataset::new(m, rows, labels).unwrap()
}
