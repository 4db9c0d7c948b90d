use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gatetrain_core::GatePolicy;

use crate::datasets::DatasetKind;

#[derive(Debug, Parser)]
#[command(name = "gatetrain", version, about = "Mistake-gated online training experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one network and dump run, snapshot and per-sample CSVs.
    Train(TrainArgs),
    /// Steps to target accuracy across a learning-rate grid.
    SweepLr(SweepLrArgs),
    /// Unique mistaken samples versus training-set size, with a power-law fit.
    Scaling(ScalingArgs),
    /// Gated versus ungated training on Gaussian-blurred images.
    Blur(BlurArgs),
    /// Pretrain on some classes, then add the rest.
    Incremental(IncrementalArgs),
    /// Train on a 2-D toy task and plot which samples drove learning.
    Viz2d(Viz2dArgs),
    /// Check analytic gradients against finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Update on every sample.
    Always,
    /// Update only on misclassified samples.
    Pure,
    /// Update on samples misclassified now or at any earlier visit.
    Memorized,
}

impl From<PolicyArg> for GatePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Always => GatePolicy::Always,
            PolicyArg::Pure => GatePolicy::PureMistake,
            PolicyArg::Memorized => GatePolicy::MemorizedMistake,
        }
    }
}

pub fn policies(args: &[PolicyArg]) -> Vec<GatePolicy> {
    args.iter().copied().map(GatePolicy::from).collect()
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long, value_enum, default_value = "mnist")]
    pub dataset: DatasetKind,
    /// Root holding `mnist/` and `emnist/` IDX files.
    #[arg(long, env = "GATETRAIN_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    /// Use a seeded random subset of the training set.
    #[arg(long)]
    pub train_limit: Option<usize>,
    /// Use a seeded random subset of the test set.
    #[arg(long)]
    pub test_limit: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Hidden layer widths, e.g. `200` or `256,128`.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    pub hidden: Vec<usize>,
    /// Snapshot every N presentations (default: once per epoch).
    #[arg(long)]
    pub eval_every: Option<u64>,
    /// Also score the full training set at every snapshot.
    #[arg(long)]
    pub eval_train: bool,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "memorized")]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Stop once test accuracy reaches this value.
    #[arg(long)]
    pub criterion: Option<f64>,
    #[arg(long, default_value_t = 30)]
    pub max_epochs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Layer indices (0 = first weight layer) excluded from updates.
    #[arg(long, value_delimiter = ',')]
    pub freeze: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepLrArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.003,0.01,0.03,0.1,0.3")]
    pub lrs: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "always,pure,memorized")]
    pub policies: Vec<PolicyArg>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    /// Test accuracies to record steps for; runs stop at the highest.
    #[arg(long, value_delimiter = ',', default_value = "0.95,0.96,0.97")]
    pub targets: Vec<f64>,
    #[arg(long, default_value_t = 30)]
    pub max_epochs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Training-set sizes (default depends on the dataset).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Target test accuracy (default 0.97 for MNIST, 0.98 otherwise).
    #[arg(long)]
    pub criterion: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "memorized")]
    pub policies: Vec<PolicyArg>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 50)]
    pub max_epochs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BlurArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub sigmas: Vec<f64>,
    #[arg(long, default_value_t = 0.97)]
    pub criterion: f64,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "always,memorized")]
    pub policies: Vec<PolicyArg>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 50)]
    pub max_epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FreezeArg {
    /// Every layer stays plastic.
    None,
    /// Only the output layer learns.
    Hidden,
}

impl FreezeArg {
    pub fn name(self) -> &'static str {
        match self {
            FreezeArg::None => "none",
            FreezeArg::Hidden => "hidden",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct IncrementalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6")]
    pub old_classes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "7,8,9")]
    pub new_classes: Vec<usize>,
    #[arg(long, value_enum, default_value = "always")]
    pub pretrain_policy: PolicyArg,
    #[arg(long, default_value_t = 0.01)]
    pub pretrain_lr: f64,
    /// Old-class test accuracy that ends pretraining.
    #[arg(long, default_value_t = 0.95)]
    pub pretrain_criterion: f64,
    #[arg(long, default_value_t = 30)]
    pub pretrain_epochs: usize,
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,
    /// New-class test accuracy that ends the second phase.
    #[arg(long, default_value_t = 0.9)]
    pub new_target: f64,
    #[arg(long, default_value_t = 10)]
    pub max_epochs: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "none,hidden")]
    pub freeze: Vec<FreezeArg>,
    /// Augmentation factors (1 = original images only).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub augment: Vec<usize>,
    /// Subsample the training set to this many images before augmenting.
    #[arg(long)]
    pub base_size: Option<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "always,memorized")]
    pub policies: Vec<PolicyArg>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub seeds: Vec<u64>,
    /// Start the second phase with a cleared mistake memory.
    #[arg(long)]
    pub reset_memory: bool,
    /// Also measure unique mistakes on subsets of these sizes of the
    /// (augmented) training set, continuing from the same pretrained network.
    #[arg(long, value_delimiter = ',')]
    pub scaling_sizes: Vec<usize>,
    /// New-class accuracy that ends a scaling run.
    #[arg(long, default_value_t = 0.85)]
    pub scaling_target: f64,
}

#[derive(Debug, Clone, Args)]
pub struct Viz2dArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, value_delimiter = ',', default_value = "20")]
    pub hidden: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "always,pure,memorized")]
    pub policies: Vec<PolicyArg>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GradcheckArgs {
    /// Optional directory for gradcheck.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub nets: usize,
    #[arg(long, default_value_t = 60)]
    pub max_params: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}
