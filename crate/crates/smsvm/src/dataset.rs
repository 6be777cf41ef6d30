//! In-memory training data: sparse feature rows plus `±1` labels.

use crate::error::{Error, Result};
use crate::scalar::Float;

/// One sample's features: parallel `(index, value)` arrays, indices strictly
/// ascending and all in `[0, n_features)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow<F> {
    indices: Vec<u32>,
    values: Vec<F>,
}

impl<F: Float> SparseRow<F> {
    /// Builds a row from `(index, value)` pairs; sorts them and rejects
    /// duplicate indices.
    pub fn new(mut pairs: Vec<(u32, F)>) -> Result<Self> {
        pairs.sort_unstable_by_key(|&(i, _)| i);
        for win in pairs.windows(2) {
            if win[0].0 == win[1].0 {
                return Err(Error::InvalidData {
                    msg: format!("duplicate feature index {}", win[0].0),
                });
            }
        }
        let indices = pairs.iter().map(|&(i, _)| i).collect();
        let values = pairs.iter().map(|&(_, v)| v).collect();
        Ok(Self { indices, values })
    }

    /// Feature indices, ascending.
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// Feature values, parallel to `indices`.
    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Iterates `(index, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, F)> + '_ {
        self.indices
            .iter()
            .zip(self.values.iter())
            .map(|(&i, &v)| (i as usize, v))
    }

    /// Number of stored (possibly zero-valued) entries.
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Dense dot product `x . w`; `w` must cover every index of the row.
    pub fn dot(&self, w: &[F]) -> F {
        let mut acc = F::zero();
        for (i, v) in self.iter() {
            acc += v * w[i];
        }
        acc
    }
}

/// A binary classification dataset with `n` samples over `m` features.
///
/// Labels are stored as scalars but constrained to exactly `-1` or `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F> {
    n_features: usize,
    rows: Vec<SparseRow<F>>,
    labels: Vec<F>,
}

impl<F: Float> Dataset<F> {
    /// Builds a dataset, validating shapes, label values, index ranges, and
    /// finiteness of every feature value.
    pub fn new(n_features: usize, rows: Vec<SparseRow<F>>, labels: Vec<F>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                what: "dataset rows vs labels",
                expected: rows.len(),
                got: labels.len(),
            });
        }
        for (r, label) in labels.iter().enumerate() {
            if *label != F::one() && *label != -F::one() {
                return Err(Error::InvalidData {
                    msg: format!("label of sample {r} is {label}, expected -1 or +1"),
                });
            }
        }
        for (r, row) in rows.iter().enumerate() {
            if let Some(&max) = row.indices.last() {
                if max as usize >= n_features {
                    return Err(Error::InvalidData {
                        msg: format!(
                            "sample {r} has feature index {max}, but the dataset has {n_features} features"
                        ),
                    });
                }
            }
            if row.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidData {
                    msg: format!("sample {r} contains a non-finite feature value"),
                });
            }
        }
        Ok(Self {
            n_features,
            rows,
            labels,
        })
    }

    /// Number of samples.
    pub fn n_samples(&self) -> usize {
        self.rows.len()
    }

    /// Number of features (weight-vector length).
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Sample rows.
    pub fn rows(&self) -> &[SparseRow<F>] {
        &self.rows
    }

    /// Labels, each exactly `-1` or `+1`.
    pub fn labels(&self) -> &[F] {
        &self.labels
    }

    /// Returns a copy with one constant feature `1` appended to every row
    /// (index `m`), for models trained with a bias column.
    pub fn with_bias_column(&self) -> Self {
        let m = self.n_features;
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut indices = row.indices.clone();
                let mut values = row.values.clone();
                indices.push(m as u32);
                values.push(F::one());
                SparseRow { indices, values }
            })
            .collect();
        Self {
            n_features: m + 1,
            rows,
            labels: self.labels.clone(),
        }
    }

    /// Builds the sub-dataset containing `idx` (in the given order).
    /// A new dataset holding the rows at `idx`, in the order given. Feature
    /// count is preserved. Indices must be in range.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            n_features: self.n_features,
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Predicted label for a decision value: `sign(w . x)` with ties going to `+1`.
pub fn predict_label<F: Float>(decision: F) -> F {
    if decision >= F::zero() {
        F::one()
    } else {
        -F::one()
    }
}

/// Fraction of samples whose predicted label matches, in `[0, 1]`.
///
/// Rows whose indices exceed `w.len() - 1` are rejected.
pub fn accuracy<F: Float>(data: &Dataset<F>, w: &[F]) -> Result<F> {
    if w.len() != data.n_features() {
        return Err(Error::DimensionMismatch {
            what: "accuracy weights",
            expected: data.n_features(),
            got: w.len(),
        });
    }
    if data.n_samples() == 0 {
        return Err(Error::InvalidData {
            msg: "cannot score an empty dataset".into(),
        });
    }
    let mut correct = 0usize;
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        if predict_label(row.dot(w)) == y {
            correct += 1;
        }
    }
    Ok(F::from(correct).unwrap() / F::from(data.n_samples()).unwrap())
}
