//! Command-line front end for the smsvm solver: training, prediction,
//! benchmarking, synthetic data generation, and hinge loss-curve emission.

mod bench;
mod curve;
mod gendata;
mod method;
mod model;
mod predict;
mod train;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "smsvm",
    version,
    about = "Train, score, and benchmark sparse linear SVMs with a smoothed hinge loss"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on a libSVM file and write it as JSON.
    Train(train::TrainArgs),
    /// Score a trained model on a libSVM file.
    Predict(predict::PredictArgs),
    /// Run a benchmark sweep from a config file and emit CSV/JSON tables.
    Bench(bench::BenchArgs),
    /// Generate a two-centroid Gaussian dataset in libSVM format.
    GenData(gendata::GenDataArgs),
    /// Emit the mean exact hinge loss of a random 1-D dataset over a weight grid.
    SmoothCurve(curve::CurveArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => train::run(&args),
        Command::Predict(args) => predict::run(&args),
        Command::Bench(args) => bench::run(&args),
        Command::GenData(args) => gendata::run(&args),
        Command::SmoothCurve(args) => curve::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
