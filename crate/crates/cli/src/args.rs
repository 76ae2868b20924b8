use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pyp_means::pyp::Variant;

#[derive(Debug, Parser)]
#[command(name = "pyp", version, about = "pyp-means clustering experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a CSV file with pyp-means, dp-means or k-means.
    Cluster(ClusterArgs),
    /// Kernel eigendecomposition, threshold selection of c, then k-means on
    /// the embedding.
    Spectral(SpectralArgs),
    /// Simulate the modified urn and write the color sizes.
    Urn(UrnArgs),
    /// Write a synthetic power-law Gaussian mixture as CSV.
    Datagen(DatagenArgs),
    /// Score an assignments file against ground-truth labels.
    Evaluate(EvaluateArgs),
    /// Repeated runs over a grid of datasets, lambdas and variants.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Clone)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Label column: a header name or `last`.
    #[arg(long)]
    pub labels: Option<String>,
    /// Min-max scale every feature to [0, 1] before clustering.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args, Clone)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: InputArgs,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, conflicts_with = "theta_ratio")]
    pub theta: Option<f64>,
    /// theta = lambda / ratio when --theta is absent [default: 10]
    #[arg(long)]
    pub theta_ratio: Option<f64>,
    /// Estimate lambda by farthest-first traversal for this rough cluster
    /// count.
    #[arg(long, conflicts_with = "lambda")]
    pub estimate_c: Option<usize>,
    #[arg(long, default_value = "pyp")]
    pub variant: Variant,
    /// Cluster count for the kmeans variant.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub no_agglomeration: bool,
    /// Test `min_dist - theta` against the threshold.
    #[arg(long)]
    pub alg1_offset: bool,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Rbf,
    Linear,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, value_enum, default_value = "rbf")]
    pub kernel: KernelArg,
    /// RBF bandwidth; defaults to the median pairwise distance.
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct UrnArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct DatagenArgs {
    #[arg(long)]
    pub c: usize,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 200)]
    pub big_size: usize,
    #[arg(long, default_value_t = 30)]
    pub small_size: usize,
    /// Number of large clusters [default: min(c, 2)]
    #[arg(long)]
    pub n_big: Option<usize>,
    #[arg(long, default_value_t = 20.0)]
    pub center_box: f64,
    /// Redraw centers closer than this to an earlier one.
    #[arg(long)]
    pub min_center_dist: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "last")]
    pub labels: String,
    /// `point,cluster` CSV as written by `cluster`.
    #[arg(long)]
    pub assignments: PathBuf,
    /// Also write `record.txt` here.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep a single labelled CSV file...
    #[arg(long, required_unless_present = "generate_c", conflicts_with = "generate_c")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "last")]
    pub labels: String,
    /// ...or freshly generated data with these true cluster counts, one
    /// dataset per repeat.
    #[arg(long, value_delimiter = ',')]
    pub generate_c: Vec<usize>,
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Add a cell whose lambda is estimated with the true cluster count.
    #[arg(long)]
    pub estimate: bool,
    #[arg(long, default_value_t = 10.0)]
    pub theta_ratio: f64,
    #[arg(long, value_delimiter = ',', default_value = "pyp")]
    pub variant: Vec<Variant>,
    #[arg(long, default_value_t = 20)]
    pub repeats: usize,
    #[arg(long)]
    pub no_agglomeration: bool,
    #[arg(long)]
    pub alg1_offset: bool,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}
