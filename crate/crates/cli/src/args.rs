use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "gradcompass", version, about = "Directional statistics of minibatch gradients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// κ̂ of uniform samples (true κ = 0) across dimensions and sample counts.
    VmfBias(VmfBiasArgs),
    /// Angles between independent uniform directions against their normal limit.
    AngleAsymptotics(AngleArgs),
    /// Minibatch gradient norm moments: exact enumeration or an MNIST batch-size sweep.
    NormStochasticity(NormArgs),
    /// Resultant-decrease batteries and the quadratic-ensemble SGD simulation.
    Geometry(GeometryArgs),
    /// Train the 784-800-10 network on MNIST with per-epoch instrumentation.
    Train(TrainArgs),
    /// Correlations between κ̂, GS and GNS from a metrics.csv.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VmfBias(_) => "vmf-bias",
            Command::AngleAsymptotics(_) => "angle-asymptotics",
            Command::NormStochasticity(_) => "norm-stochasticity",
            Command::Geometry(_) => "geometry",
            Command::Train(_) => "train",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VmfBiasArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [207_152usize, 635_200])]
    pub dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 2000, 3000])]
    pub samples: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AngleArgs {
    #[arg(long, default_value_t = 10_000)]
    pub dim: usize,
    #[arg(long, default_value_t = 100_000)]
    pub pairs: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    Exact,
    Fnn,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NormArgs {
    #[arg(long, value_enum, default_value_t = NormMode::Exact)]
    pub mode: NormMode,
    /// Exact mode: number of random gradient sets.
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
    /// Exact mode: largest number of examples per set.
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
    /// Exact mode: largest gradient dimension.
    #[arg(long, default_value_t = 8)]
    pub max_d: usize,
    /// Fnn mode: directory holding the four MNIST IDX files.
    #[arg(long, default_value = "data/mnist")]
    pub mnist_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 256, 1024, 4096])]
    pub batch_sizes: Vec<usize>,
    /// Fnn mode: number of fresh random initializations.
    #[arg(long, default_value_t = 1)]
    pub inits: usize,
    #[arg(long, default_value_t = 200)]
    pub n_s: usize,
    /// Fnn mode: use only the first this-many training images (all by default).
    #[arg(long)]
    pub train_subset: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma2,
    Theorem3,
    Corollary1,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeometryArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Battery size for lemma2 and theorem3.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 50)]
    pub max_d: usize,
    #[arg(long, default_value_t = 20)]
    pub max_nb: usize,
    /// Perturbation norm as a fraction of the admissible threshold.
    #[arg(long, default_value_t = 0.5)]
    pub xi_fraction: f64,
    /// corollary1: parameter dimension.
    #[arg(long, default_value_t = 20)]
    pub dim: usize,
    /// corollary1: number of quadratic members.
    #[arg(long, default_value_t = 50)]
    pub n_b: usize,
    #[arg(long, default_value_t = 1.1)]
    pub max_condition: f64,
    #[arg(long, default_value_t = 25)]
    pub epochs: usize,
    /// Distance from the start point to the anchor cloud center.
    #[arg(long, default_value_t = 10.0)]
    pub offset: f64,
    /// Per-epoch displacement as a fraction of the nearest anchor distance.
    #[arg(long, default_value_t = 1e-3)]
    pub displacement: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long, default_value = "data/mnist")]
    pub mnist_dir: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 10_000)]
    pub train_subset: usize,
    #[arg(long, default_value_t = 1000)]
    pub n_s: usize,
    #[arg(long, default_value_t = 1)]
    pub instrument_every: usize,
    /// Epochs at which angles against a fixed uniform direction are written.
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 30])]
    pub angle_epochs: Vec<usize>,
    /// Skip evaluating the validation split.
    #[arg(long)]
    pub no_valid: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub metrics: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}
