//! `gen-data`: write a two-centroid Gaussian dataset in libSVM format.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use smsvm::{generate_synthetic, write_libsvm_path, SyntheticSpec};

#[derive(Args, Debug)]
pub struct GenDataArgs {
    /// Number of samples (split n/2 positive, the rest negative).
    #[arg(long)]
    pub n: usize,

    /// Number of features.
    #[arg(long)]
    pub m: usize,

    /// Scale of the class centroids relative to the unit noise.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub centroid_scale: f64,

    /// Fraction in [0, 1) of centroid components forced to zero.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub sparsity: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output path (`.gz` compresses transparently).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &GenDataArgs) -> Result<()> {
    let spec = SyntheticSpec {
        n: args.n,
        m: args.m,
        centroid_scale: args.centroid_scale,
        sparsity: args.sparsity,
        seed: args.seed,
    };
    let synth = generate_synthetic::<f64>(&spec).context("generating the dataset")?;
    write_libsvm_path(&synth.data, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} (n = {}, m = {}, seed = {})",
        args.out.display(),
        args.n,
        args.m,
        args.seed
    );
    Ok(())
}
