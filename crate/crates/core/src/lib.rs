//! Mistake-gated online training for dense feed-forward classifiers.
//!
//! A network is trained one sample at a time. Before each parameter update a
//! gate decides whether the update happens at all: always (plain backprop),
//! only on a current misclassification, or on a current or remembered
//! misclassification. Runs record update counts, the cumulative L1 size of all
//! updates (M1 energy) and the set of samples that ever drove learning.

pub mod analysis;
pub mod data;
pub mod error;
pub mod gating;
pub mod gradcheck;
pub mod metrics;
pub mod network;
pub mod rng;
pub mod trainer;

pub use analysis::{fit_power_law, savings_ratio, PowerLawFit, Savings, SweepRow};
pub use data::LabeledDataset;
pub use error::{Error, Result};
pub use gating::{gate_decision, GatePolicy, MistakeMemory};
pub use metrics::{weight_norms, RunMetrics, Snapshot, WeightNormReport};
pub use network::{predict, ForwardTrace, GradientSet, LayerParams, Mlp};
pub use trainer::{
    incremental_train, steps_to_accuracy, train, IncrementalConfig, IncrementalOutcome, StopOn, StopReason,
    TrainConfig, TrainOutcome, Trainer,
};
