//! `noncvx`: exact, Monte Carlo and sample-based measures of non-convexity.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use noncvx::{Family, MeasureKind, Target};

#[derive(Parser)]
#[command(name = "noncvx", version, about = "Measures of non-convexity for planar sets")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "NONCVX_THREADS")]
    threads: Option<usize>,
    /// Where to write the run manifest. Defaults to `<out>.manifest.json`,
    /// `<out>/manifest.json` for experiments, or standard error.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Population values of D, M, W and L for a family member or a mask.
    Measure(MeasureArgs),
    /// Sample-based estimates from a point cloud.
    Estimate(EstimateArgs),
    /// Run an experiment spec (sweep, curves or coverage).
    Experiment(ExperimentArgs),
    /// Draw a uniform sample and write it as CSV.
    Sample(SampleArgs),
}

#[derive(Args, Debug, Clone)]
struct SetArgs {
    /// One of A1, A2, A3.
    #[arg(long, conflicts_with = "mask", requires = "t")]
    family: Option<Family>,
    #[arg(long, requires = "family")]
    t: Option<f64>,
    /// Binary mask (PGM or 0/1 CSV); values above 127 are foreground.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Side length of a mask pixel.
    #[arg(long, default_value_t = 1.0)]
    pixel_size: f64,
}

impl SetArgs {
    fn target(&self) -> Option<Target> {
        match (&self.family, self.t, &self.mask) {
            (Some(family), Some(t), _) => Some(Target::Family { family: *family, t }),
            (_, _, Some(mask)) => Some(Target::Mask {
                mask: mask.clone(),
                pixel_size: self.pixel_size,
            }),
            _ => None,
        }
    }
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Midpoint pairs for W.
    #[arg(long, default_value_t = 5000)]
    pairs: usize,
    /// Random triangles for L.
    #[arg(long, default_value_t = 5000)]
    triples: usize,
    /// Points per triangle for L.
    #[arg(long, default_value_t = 256)]
    kernel_points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Point cloud CSV with header `x,y`.
    #[arg(long, conflicts_with_all = ["family", "mask"])]
    input: Option<PathBuf>,
    #[command(flatten)]
    set: SetArgs,
    /// Sample size drawn from --family or --mask.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated subset of D, M, W, L_hat, L_kernel, L_indicator.
    #[arg(long, value_delimiter = ',', default_value = "D,M,W,L_hat")]
    estimators: Vec<MeasureKind>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Monte Carlo pairs for W (defaults to the sample size).
    #[arg(long)]
    m: Option<usize>,
    /// Triangle budget of the L statistics.
    #[arg(long)]
    triples: Option<usize>,
    /// Quadruple budget of L_indicator.
    #[arg(long)]
    quadruples: Option<usize>,
    #[arg(long)]
    kernel_points: Option<usize>,
    /// Known area of the set, used by L instead of the r-hull area.
    #[arg(long)]
    area: Option<f64>,
    /// Confidence level of the interval for L.
    #[arg(long)]
    level: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// JSON spec with `kind` = sweep, curves or coverage.
    spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Use the full-scale sample sizes and replicate count (sweeps only).
    #[arg(long)]
    full_scale: bool,
    /// Override the spec's base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("thread pool is configured once");
    }
    let result = match &cli.command {
        Command::Measure(a) => commands::measure(a, cli.manifest.as_deref()),
        Command::Estimate(a) => commands::estimate(a, cli.manifest.as_deref()),
        Command::Experiment(a) => commands::experiment(a, cli.manifest.as_deref()),
        Command::Sample(a) => commands::sample(a, cli.manifest.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            if e.code == 2 {
                eprintln!("\nRun `noncvx --help` for usage.");
            }
            ExitCode::from(e.code)
        }
    }
}
