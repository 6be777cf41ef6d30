//! `predict`: score a trained model on a libSVM file and optionally write
//! the predicted labels.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use smsvm::{predict_label, read_libsvm_path, Dataset64};

use crate::model::ModelFile;

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    pub model: PathBuf,

    /// Data to score, in libSVM format.
    #[arg(long)]
    pub data: PathBuf,

    /// Write one predicted label per line here, in the training file's raw
    /// label convention.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Score data whose feature count exceeds the model's by ignoring the
    /// features the model never saw.
    #[arg(long)]
    pub allow_dim_mismatch: bool,
}

/// Weights re-indexed into the data's feature space: shared features keep
/// their weight, features the model never saw get zero (that is what
/// "truncate" means here), and the bias weight follows the bias column to
/// the data's own last slot.
fn eval_weights(model: &ModelFile, data_features: usize) -> Vec<f64> {
    let mut w = vec![0.0; data_features + usize::from(model.bias_augmented)];
    let shared = model.n_features.min(data_features);
    w[..shared].copy_from_slice(&model.weights[..shared]);
    if model.bias_augmented {
        w[data_features] = model.weights[model.n_features];
    }
    w
}

fn score(data: &Dataset64, w: &[f64]) -> (Vec<f64>, f64) {
    let mut predictions = Vec::with_capacity(data.n_samples());
    let mut correct = 0usize;
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        let pred = predict_label(row.dot(w));
        if pred == y {
            correct += 1;
        }
        predictions.push(pred);
    }
    let accuracy = 100.0 * correct as f64 / data.n_samples() as f64;
    (predictions, accuracy)
}

pub fn run(args: &PredictArgs) -> Result<()> {
    let model = ModelFile::load(&args.model)?;
    let parsed = read_libsvm_path::<f64>(&args.data, None)
        .with_context(|| format!("reading data file {}", args.data.display()))?;
    let data_features = parsed.data.n_features();
    if data_features > model.n_features && !args.allow_dim_mismatch {
        bail!(
            "{} has {} features but the model was trained on {}; \
             pass --allow-dim-mismatch to ignore the extra features",
            args.data.display(),
            data_features,
            model.n_features
        );
    }
    if parsed.data.n_samples() == 0 {
        bail!("{} contains no samples", args.data.display());
    }

    let data = if model.bias_augmented {
        parsed.data.with_bias_column()
    } else {
        parsed.data
    };
    let w = eval_weights(&model, data_features);
    let (predictions, accuracy) = score(&data, &w);

    println!("accuracy: {accuracy:.1}");

    if let Some(path) = &args.out {
        let mut text = String::new();
        for &p in &predictions {
            text.push_str(&format!("{}\n", model.label_map.raw(p)));
        }
        fs::write(path, text)
            .with_context(|| format!("writing predictions file {}", path.display()))?;
    }
    Ok(())
}
