//! Executing independent runs and summarizing them.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use gatetrain_core::trainer::evaluate;
use gatetrain_core::{
    steps_to_accuracy, weight_norms, LabeledDataset, Mlp, SweepRow, TrainConfig, TrainOutcome,
};
use rayon::prelude::*;

use crate::output::RunRecord;

/// Everything needed to reproduce one run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub run_id: String,
    /// Name and value of the swept variable, e.g. `("lr", 0.01)`.
    pub condition: (String, f64),
    pub seed: u64,
    pub layer_sizes: Vec<usize>,
    pub config: TrainConfig,
}

impl RunSpec {
    pub fn new(prefix: &str, condition: (&str, f64), seed: u64, layer_sizes: Vec<usize>, config: TrainConfig) -> Self {
        let run_id = format!("{prefix}-{}{}-{}-s{seed}", condition.0, condition.1, config.policy);
        Self { run_id, condition: (condition.0.to_string(), condition.1), seed, layer_sizes, config }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub spec: RunSpec,
    pub outcome: TrainOutcome,
    pub initial: Mlp,
    pub final_train_accuracy: f64,
    pub final_test_accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
}

/// Trains from a fresh initialization drawn from the spec's seed.
pub fn execute(spec: RunSpec, train: &LabeledDataset, test: &LabeledDataset) -> Result<RunResult> {
    let mlp = Mlp::new(&spec.layer_sizes, spec.seed)?;
    execute_from(spec, mlp, train, test, |cfg, mlp| gatetrain_core::train(mlp, train, test, cfg))
}

/// As [`execute`], but from a given network through a caller-supplied trainer.
pub fn execute_from(
    spec: RunSpec,
    initial: Mlp,
    train: &LabeledDataset,
    test: &LabeledDataset,
    run: impl FnOnce(&TrainConfig, Mlp) -> gatetrain_core::Result<TrainOutcome>,
) -> Result<RunResult> {
    let outcome = run(&spec.config, initial.clone()).with_context(|| format!("run {}", spec.run_id))?;
    let final_train_accuracy = match outcome.metrics.last_snapshot().and_then(|s| s.train_accuracy) {
        Some(a) => a,
        None => evaluate(&outcome.network, train)?.accuracy,
    };
    let final_test_accuracy = match outcome.metrics.last_snapshot() {
        Some(s) => s.test_accuracy,
        None => evaluate(&outcome.network, test)?.accuracy,
    };
    Ok(RunResult {
        spec,
        outcome,
        initial,
        final_train_accuracy,
        final_test_accuracy,
        train_size: train.len(),
        test_size: test.len(),
    })
}

/// Maps `f` over `items` on up to `jobs` threads; output order follows input order.
pub fn par_map<T, R, F>(jobs: usize, items: Vec<T>, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Sync + Send,
{
    if jobs <= 1 {
        return items.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| items.into_par_iter().map(f).collect())
}

impl RunResult {
    pub fn record(&self, subcommand: &'static str, dataset: &str) -> Result<RunRecord> {
        let m = &self.outcome.metrics;
        let net = &self.outcome.network;
        let norms = weight_norms(net, &self.initial)?;
        let cfg = &self.spec.config;
        Ok(RunRecord {
            run_id: self.spec.run_id.clone(),
            subcommand,
            dataset: dataset.to_string(),
            condition: format!("{}={}", self.spec.condition.0, self.spec.condition.1),
            policy: cfg.policy.to_string(),
            lr: cfg.lr,
            max_epochs: cfg.max_epochs,
            criterion: cfg.criterion,
            eval_every: cfg.eval_every,
            seed: self.spec.seed,
            layer_sizes: net.layer_sizes().to_vec(),
            plastic: net.plastic().to_vec(),
            train_size: self.train_size,
            test_size: self.test_size,
            stop_reason: self.outcome.stop_reason.name(),
            forward_steps: m.forward_steps,
            update_steps: m.update_steps,
            epochs_completed: m.epochs_completed,
            m1_energy: m.m1_energy,
            unique_mistakes: self.outcome.memory.unique_mistake_count(),
            normalized_updates: m.normalized_updates(net.param_count(), self.train_size)?,
            weight_l1: norms.l1,
            weight_l2: norms.l2,
            final_train_accuracy: self.final_train_accuracy,
            final_test_accuracy: self.final_test_accuracy,
        })
    }

    pub fn sweep_row(&self, targets: &[f64]) -> Result<SweepRow> {
        let m = &self.outcome.metrics;
        let net = &self.outcome.network;
        let norms = weight_norms(net, &self.initial)?;
        Ok(SweepRow {
            condition: self.spec.condition.0.clone(),
            value: self.spec.condition.1,
            policy: self.spec.config.policy,
            seed: self.spec.seed,
            targets: targets.to_vec(),
            steps_to_targets: steps_to_accuracy(&m.snapshots, targets),
            forward_steps: m.forward_steps,
            update_steps: m.update_steps,
            epochs_completed: m.epochs_completed,
            m1_energy: m.m1_energy,
            unique_mistakes: self.outcome.memory.unique_mistake_count(),
            normalized_updates: m.normalized_updates(net.param_count(), self.train_size)?,
            weight_l1: norms.l1,
            weight_l2: norms.l2,
            final_test_accuracy: self.final_test_accuracy,
            stop_reason: self.outcome.stop_reason.name().to_string(),
        })
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// `[input, hidden..., classes]`.
pub fn layer_sizes(data: &LabeledDataset, hidden: &[usize]) -> Vec<usize> {
    let mut sizes = vec![data.dim()];
    sizes.extend_from_slice(hidden);
    sizes.push(data.n_classes());
    sizes
}
