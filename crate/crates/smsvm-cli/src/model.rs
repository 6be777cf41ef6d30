//! The versioned JSON model file written by `train` and read by `predict`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use smsvm::LabelMap;

pub const SCHEMA_VERSION: u32 = 1;

/// How the training file's raw labels were mapped onto -1/+1, recorded so
/// predictions can be written back in the same convention. A side is absent
/// when that class never appeared in the training file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelMapJson {
    pub negative: Option<f64>,
    pub positive: Option<f64>,
}

impl From<LabelMap> for LabelMapJson {
    fn from(map: LabelMap) -> Self {
        Self {
            negative: map.negative,
            positive: map.positive,
        }
    }
}

impl LabelMapJson {
    /// The raw label to emit for an internal -1/+1 prediction; classes the
    /// training file never showed fall back to the internal value.
    pub fn raw(self, internal: f64) -> f64 {
        if internal > 0.0 {
            self.positive.unwrap_or(1.0)
        } else {
            self.negative.unwrap_or(-1.0)
        }
    }
}

/// Hyperparameters recorded for provenance. Newton and baseline fields are
/// all optional so one schema covers every method; fields the method does
/// not use are simply absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperparamsJson {
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kkt_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    pub seed: u64,
}

/// A trained linear model with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub method: String,
    /// Raw input feature count, before any bias augmentation.
    pub n_features: usize,
    /// Whether a constant-1 feature was appended during training; the last
    /// weight is then the bias.
    pub bias_augmented: bool,
    pub weights: Vec<f64>,
    pub label_map: LabelMapJson,
    pub hyperparams: HyperparamsJson,
}

impl ModelFile {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).context("serializing the model")?;
        fs::write(path, text + "\n")
            .with_context(|| format!("writing model file {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading model file {}", path.display()))?;
        let model: ModelFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing model file {}", path.display()))?;
        if model.schema_version != SCHEMA_VERSION {
            bail!(
                "model file {} has schema version {}, this build reads version {}",
                path.display(),
                model.schema_version,
                SCHEMA_VERSION
            );
        }
        let expected = model.n_features + usize::from(model.bias_augmented);
        if model.weights.len() != expected {
            bail!(
                "model file {} is inconsistent: {} weights for {} features{}",
                path.display(),
                model.weights.len(),
                model.n_features,
                if model.bias_augmented { " plus a bias column" } else { "" }
            );
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_model() -> ModelFile {
        ModelFile {
            schema_version: SCHEMA_VERSION,
            method: "smsvm-l1l2".into(),
            n_features: 3,
            bias_augmented: true,
            weights: vec![0.5, 0.0, -1.25, 0.1],
            label_map: LabelMapJson {
                negative: Some(0.0),
                positive: Some(1.0),
            },
            hyperparams: HyperparamsJson {
                lambda: 1e-2,
                mu: Some(0.05),
                seed: 7,
                ..HyperparamsJson::default()
            },
        }
    }

    #[test]
    fn save_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = sample_model();
        model.save(&path).unwrap();
        let loaded = ModelFile::load(&path).unwrap();
        assert_eq!(loaded.weights, model.weights, "weights should survive the round trip");
        assert_eq!(loaded.method, model.method);
        assert_eq!(loaded.label_map, model.label_map);
        assert_eq!(loaded.hyperparams, model.hyperparams);
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let mut model = sample_model();
        model.schema_version = 99;
        model.save(&path).unwrap();
        let err = ModelFile::load(&path).unwrap_err().to_string();
        assert!(
            err.contains("schema version 99"),
            "error should name the offending version, got: {err}"
        );
    }

    #[test]
    fn weight_count_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let mut model = sample_model();
        model.weights.pop();
        model.save(&path).unwrap();
        let err = ModelFile::load(&path).unwrap_err().to_string();
        assert!(err.contains("inconsistent"), "expected a consistency error, got: {err}");
    }

    #[test]
    fn raw_label_mapping_prefers_the_recorded_convention() {
        let map = LabelMapJson {
            negative: Some(0.0),
            positive: Some(1.0),
        };
        assert_eq!(map.raw(1.0), 1.0);
        assert_eq!(map.raw(-1.0), 0.0, "a 0/1 training file should predict 0, not -1");
        let bare = LabelMapJson {
            negative: None,
            positive: Some(2.0),
        };
        assert_eq!(bare.raw(-1.0), -1.0, "an absent class falls back to the internal label");
    }
}
