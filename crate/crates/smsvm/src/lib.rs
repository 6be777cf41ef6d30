//! Sparse linear SVM training with a smoothed hinge loss.
//!
//! The centerpiece is [`svm_smooth`]: an active-set Newton method for the
//! l1/l2-regularized soft-margin objective
//!
//! ```text
//!   min_w  lambda/2 ||w||^2  +  mu ||w||_1  +  (1/n) sum_i psi_eps(1 - y_i <w, x_i>)
//! ```
//!
//! where `psi_eps(u) = (u + sqrt(eps^2 + u^2)) / 2` is a twice-differentiable
//! upper bound on the hinge that tightens as `eps -> 0`. The solver drives
//! `eps` down a geometric schedule, keeps the set of exactly-zero weights
//! explicit, restricts each Newton system to the active coordinates, and
//! minimizes every quadratic-plus-l1 one-dimensional restriction *exactly*
//! ([`linesearch::minimize_quadratic_l1`]) so weights land on zero rather
//! than near it.
//!
//! Supporting cast:
//!
//! * [`baselines`] — subgradient descent, mini-batch SGD, and Polak-Ribiere+
//!   nonlinear CG on the exact (nonsmooth) hinge, for comparisons under the
//!   same evaluation counters.
//! * [`data`] — libSVM-format ingestion (gzip-aware, flexible label
//!   conventions), a two-centroid Gaussian generator, and stratified
//!   train/test splitting.
//! * [`report::SolveReport`] — objective trace and evaluation counters
//!   (objective/gradient/Hessian passes, fractional data passes) shared by
//!   the solver and every baseline.
//!
//! Everything is generic over the scalar type through the [`Float`] trait;
//! `f64` is the expected default and `f32` works end to end (see the
//! `Dataset32`-style aliases at the crate root).

pub mod baselines;
pub mod data;
pub mod dataset;
pub mod error;
pub mod linalg;
pub mod linesearch;
pub mod loss;
pub mod params;
pub mod report;
mod scalar;
pub mod solver;

pub use baselines::{run_baseline, BaselineConfig, BaselineMethod, StepSchedule};
pub use data::{
    generate_synthetic, parse_libsvm, read_libsvm_path, train_test_split, write_libsvm,
    write_libsvm_path, LabelMap, ParsedData, Synthetic, SyntheticSpec,
};
pub use dataset::{accuracy, predict_label, Dataset, SparseRow};
pub use error::{Error, Result};
pub use params::HyperParams;
pub use report::{SolveReport, TracePoint};
pub use scalar::Float;
pub use solver::{kkt_residual, svm_smooth, svm_smooth_from};

/// Double-precision dataset (the default for files and the CLI).
pub type Dataset64 = Dataset<f64>;
/// Single-precision dataset.
pub type Dataset32 = Dataset<f32>;
/// Double-precision hyperparameters.
pub type HyperParams64 = HyperParams<f64>;
/// Single-precision hyperparameters.
pub type HyperParams32 = HyperParams<f32>;
/// Double-precision solve report.
pub type SolveReport64 = SolveReport<f64>;
/// Single-precision solve report.
pub type SolveReport32 = SolveReport<f32>;

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_dataset<F: Float>() -> Dataset<F> {
        let cast = |v: f64| F::from(v).unwrap();
        let rows = vec![
            SparseRow::new(vec![(0, cast(1.0)), (1, cast(0.2))]).unwrap(),
            SparseRow::new(vec![(0, cast(0.9)), (1, cast(-0.1))]).unwrap(),
            SparseRow::new(vec![(0, cast(-1.1)), (1, cast(0.3))]).unwrap(),
            SparseRow::new(vec![(0, cast(-0.8)), (1, cast(-0.2))]).unwrap(),
        ];
        let labels = vec![cast(1.0), cast(1.0), cast(-1.0), cast(-1.0)];
        Dataset::new(2, rows, labels).unwrap()
    }

    #[test]
    fn f32_solver_runs_end_to_end() {
        let data: Dataset32 = tiny_dataset();
        // f32 cannot certify the default 1e-4 KKT residual reliably; loosen it.
        let params = HyperParams32::new(0.1, 0.01).with_kkt_tol(Some(1e-3));
        let (w, report) = svm_smooth(&data, &params).unwrap();
        assert_eq!(w.len(), 2);
        assert!(w[0] > 0.0, "feature 0 carries the class signal, got w = {w:?}");
        assert!(
            report.final_kkt <= 1e-3,
            "f32 run should certify its own tolerance, residual {}",
            report.final_kkt
        );
        let acc = accuracy(&data, &w).unwrap();
        assert_eq!(acc, 1.0, "the tiny problem is separable");
    }

    #[test]
    fn f32_and_f64_agree_on_an_easy_problem() {
        let d64: Dataset64 = tiny_dataset();
        let d32: Dataset32 = tiny_dataset();
        let p64 = HyperParams64::new(0.5, 0.0);
        let p32 = HyperParams32::new(0.5, 0.0).with_kkt_tol(Some(1e-3));
        let (w64, _) = svm_smooth(&d64, &p64).unwrap();
        let (w32, _) = svm_smooth(&d32, &p32).unwrap();
        for (a, b) in w64.iter().zip(&w32) {
            assert!(
                (a - *b as f64).abs() < 1e-2,
                "precisions should agree loosely: {w64:?} vs {w32:?}"
            );
        }
    }

    #[test]
    fn f32_line_search_finds_exact_zeros() {
        let w = [1.0f32, -2.0];
        let d = [-1.0f32, 1.0];
        let p = linesearch::LineSearchProblem::new(&w, &d, 1.0, -1.5, 0.5);
        let r = linesearch::minimize_quadratic_l1(&p).unwrap();
        assert_eq!(r.s_star, 1.0);
        assert_eq!(r.zero_index, Some(0), "w[0] + s*d[0] crosses zero at s = 1");
    }

    #[test]
    fn root_reexports_compose() {
        // Exercise the top-level API the way a downstream crate would.
        let spec = SyntheticSpec {
            n: 30,
            m: 4,
            centroid_scale: 2.0,
            sparsity: 0.0,
            seed: 5,
        };
        let synth = generate_synthetic::<f64>(&spec).unwrap();
        let (train, test) = train_test_split(&synth.data, 0.2, 1).unwrap();
        let (w, report) = svm_smooth(&train, &HyperParams::new(1e-2, 0.05)).unwrap();
        assert!(report.grad_evals > 0);
        let acc = accuracy(&test, &w).unwrap();
        assert!(acc >= 0.5, "well-separated classes should beat coin flips, got {acc}");
    }
}
