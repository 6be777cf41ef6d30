//! Minimal dense symmetric linear algebra for the small active-block systems.

use crate::error::{Error, Result};
use crate::scalar::Float;

/// Dense symmetric matrix in row-major full storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Float> SymMatrix<F> {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![F::zero(); dim * dim],
        }
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.dim + j]
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    /// Adds `v` to entries `(i, j)` and, when off-diagonal, `(j, i)`.
    pub fn add_sym(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.dim + j] += v;
        if i != j {
            self.data[j * self.dim + i] += v;
        }
    }

    /// Adds `v` to every diagonal entry.
    pub fn add_diagonal(&mut self, v: F) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += v;
        }
    }

    /// Quadratic form `v' A v`.
    pub fn quad_form(&self, v: &[F]) -> F {
        debug_assert_eq!(v.len(), self.dim);
        let mut acc = F::zero();
        for i in 0..self.dim {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let mut ri = F::zero();
            for (a, &x) in row.iter().zip(v) {
                ri += *a * x;
            }
            acc += ri * v[i];
        }
        acc
    }

    /// Symmetric principal submatrix on `keep` (positions into this matrix).
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        let mut out = Self::zeros(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                out.data[a * keep.len() + b] = self.get(i, j);
            }
        }
        out
    }

    /// Solves `A x = rhs` by Cholesky factorization (`A` must be positive
    /// definite; fails otherwise).
    pub fn cholesky_solve(&self, rhs: &[F]) -> Result<Vec<F>> {
        let n = self.dim;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                what: "cholesky rhs",
                expected: n,
                got: rhs.len(),
            });
        }
        // Lower-triangular factor L with A = L L'.
        let mut l = vec![F::zero(); n * n];
        for j in 0..n {
            let mut diag = self.get(j, j);
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if !(diag > F::zero()) || !diag.is_finite() {
                return Err(Error::LinearSolve {
                    msg: format!("pivot {j} is not positive ({diag}); matrix is not positive definite"),
                });
            }
            let diag = diag.sqrt();
            l[j * n + j] = diag;
            for i in (j + 1)..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / diag;
            }
        }
        // Forward substitution L y = rhs.
        let mut x = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = l[i * n + k];
                x[i] = x[i] - lik * x[k];
            }
            x[i] = x[i] / l[i * n + i];
        }
        // Back substitution L' x = y.
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let lki = l[k * n + i];
                x[i] = x[i] - lki * x[k];
            }
            x[i] = x[i] / l[i * n + i];
        }
        Ok(x)
    }
}

/// Dot product of equal-length slices.
pub(crate) fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Squared Euclidean norm.
pub(crate) fn norm_sq<F: Float>(a: &[F]) -> F {
    a.iter().map(|&x| x * x).sum()
}

/// l1 norm.
pub(crate) fn norm_l1<F: Float>(a: &[F]) -> F {
    a.iter().map(|&x| x.abs()).sum()
}

/// Infinity norm.
pub(crate) fn norm_inf<F: Float>(a: &[F]) -> F {
    a.iter().fold(F::zero(), |m, &x| m.max(x.abs()))
}
