//! `smooth-curve`: the mean *exact* hinge loss of a random 1-D dataset over
//! a weight grid, as CSV. Averaging n kinked losses with random kink
//! locations is what makes the empirical curve look smooth; this command
//! emits that curve for plotting.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Sample count (n/2 positive, the rest negative).
    #[arg(long, default_value_t = 200)]
    pub n: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Left end of the weight grid.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub w_min: f64,

    /// Right end of the weight grid.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub w_max: f64,

    /// Number of grid points.
    #[arg(long, default_value_t = 601)]
    pub points: usize,

    /// Output CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Draws the 1-D dataset: positives uniform on [0, 1), negatives uniform on
/// (-1, 0], positives first. Deterministic under `seed`.
fn sample_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_pos = n / 2;
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n_pos {
        pts.push((rng.gen::<f64>(), 1.0));
    }
    for _ in n_pos..n {
        pts.push((-rng.gen::<f64>(), -1.0));
    }
    pts
}

/// `(1/n) sum_i max(0, 1 - y_i w x_i)` — the exact hinge, not its smoothed
/// relative.
fn mean_hinge(pts: &[(f64, f64)], w: f64) -> f64 {
    let total: f64 = pts.iter().map(|&(x, y)| (1.0 - y * w * x).max(0.0)).sum();
    total / pts.len() as f64
}

fn curve(pts: &[(f64, f64)], w_min: f64, w_max: f64, points: usize) -> Vec<(f64, f64)> {
    let step = (w_max - w_min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let w = w_min + step * i as f64;
            (w, mean_hinge(pts, w))
        })
        .collect()
}

pub fn run(args: &CurveArgs) -> Result<()> {
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    if args.points < 2 {
        bail!("--points must be at least 2");
    }
    if !(args.w_max > args.w_min) {
        bail!("--w-max must exceed --w-min, got [{}, {}]", args.w_min, args.w_max);
    }
    let pts = sample_points(args.n, args.seed);
    let rows = curve(&pts, args.w_min, args.w_max, args.points);

    let mut text = String::from("w,mean_hinge\n");
    for (w, v) in rows {
        text.push_str(&format!("{w},{v}\n"));
    }
    match &args.out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing curve file {}", path.display()))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing the curve to stdout")?,
    }
    Ok(())
}
