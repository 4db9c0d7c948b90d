//! Single-sample online training with gated updates.
//!
//! Each epoch visits the training set in a fresh seeded permutation. Every
//! presentation runs a forward pass, asks the gate whether to update, and if
//! so applies one SGD step on the cross-entropy loss. Accuracy snapshots are
//! taken every `eval_every` presentations and at every epoch end; the run
//! stops at the first snapshot that meets the criterion.

use rand::seq::SliceRandom;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::gating::{gate_decision, GatePolicy, MistakeMemory};
use crate::metrics::{RunMetrics, Snapshot};
use crate::network::{predict, ForwardTrace, Mlp, StepScratch};
use crate::rng::{self, Stream};

/// Which accuracy the stopping criterion is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopOn {
    /// Accuracy over the full test set.
    Test,
    /// Accuracy over the test samples of class group `k`.
    Group(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub max_epochs: usize,
    /// Stop at the first snapshot whose accuracy reaches this value.
    pub criterion: Option<f64>,
    pub stop_on: StopOn,
    /// Snapshot cadence in presentations; `None` means once per epoch.
    pub eval_every: Option<u64>,
    /// Whether snapshots also score the full training set.
    pub eval_train: bool,
    pub shuffle_seed: u64,
    pub policy: GatePolicy,
    /// Per-layer plasticity; `None` keeps the network's current flags.
    pub plastic: Option<Vec<bool>>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.01,
            max_epochs: 30,
            criterion: None,
            stop_on: StopOn::Test,
            eval_every: None,
            eval_train: true,
            shuffle_seed: 0,
            policy: GatePolicy::MemorizedMistake,
            plastic: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0) || !self.lr.is_finite() {
            return Err(Error::Config(format!("lr must be > 0, got {}", self.lr)));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max_epochs must be >= 1".into()));
        }
        if self.eval_every == Some(0) {
            return Err(Error::Config("eval_every must be >= 1".into()));
        }
        if let Some(c) = self.criterion {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::Config(format!("criterion must lie in (0, 1], got {c}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    CriterionReached,
    EpochBudgetExhausted,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::CriterionReached => "criterion_reached",
            StopReason::EpochBudgetExhausted => "epoch_budget_exhausted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub metrics: RunMetrics,
    pub stop_reason: StopReason,
    pub network: Mlp,
    pub memory: MistakeMemory,
}

/// Accuracy of a network on a dataset, overall and per class.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub correct_per_class: Vec<usize>,
    pub total_per_class: Vec<usize>,
}

impl Evaluation {
    /// Accuracy over the samples whose label is in `classes`; `None` if there are none.
    pub fn group_accuracy(&self, classes: &[usize]) -> Option<f64> {
        let (mut correct, mut total) = (0, 0);
        for &c in classes {
            if c < self.total_per_class.len() {
                correct += self.correct_per_class[c];
                total += self.total_per_class[c];
            }
        }
        (total > 0).then(|| correct as f64 / total as f64)
    }
}

pub fn evaluate(mlp: &Mlp, dataset: &LabeledDataset) -> Result<Evaluation> {
    check_dataset(mlp, dataset, "evaluation")?;
    let n_classes = mlp.n_classes();
    let mut correct_per_class = vec![0; n_classes];
    let mut total_per_class = vec![0; n_classes];
    let mut trace = ForwardTrace::for_network(mlp);
    for (x, &label) in dataset.samples().zip(dataset.labels()) {
        let pred = mlp.classify(x, &mut trace)?;
        total_per_class[label] += 1;
        if pred == label {
            correct_per_class[label] += 1;
        }
    }
    let total: usize = total_per_class.iter().sum();
    let correct: usize = correct_per_class.iter().sum();
    let accuracy = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
    Ok(Evaluation { accuracy, correct_per_class, total_per_class })
}

fn check_dataset(mlp: &Mlp, dataset: &LabeledDataset, what: &str) -> Result<()> {
    if dataset.dim() != mlp.input_dim() {
        return Err(Error::Shape(format!(
            "{what} set has {} features, network expects {}",
            dataset.dim(),
            mlp.input_dim()
        )));
    }
    if dataset.n_classes() > mlp.n_classes() {
        return Err(Error::Shape(format!(
            "{what} set has {} classes, network outputs {}",
            dataset.n_classes(),
            mlp.n_classes()
        )));
    }
    Ok(())
}

/// A configured training run. Use [`train`] for the common case.
pub struct Trainer<'a> {
    config: &'a TrainConfig,
    groups: Vec<Vec<usize>>,
    memory: Option<MistakeMemory>,
}

impl<'a> Trainer<'a> {
    pub fn new(config: &'a TrainConfig) -> Self {
        Self { config, groups: Vec::new(), memory: None }
    }

    /// Class groups whose test accuracy is recorded in every snapshot.
    pub fn with_groups(mut self, groups: Vec<Vec<usize>>) -> Self {
        self.groups = groups;
        self
    }

    /// Starts from an existing mistake memory instead of an all-false one.
    pub fn with_memory(mut self, memory: MistakeMemory) -> Self {
        self.memory = Some(memory);
        self
    }

    pub fn run(self, mut mlp: Mlp, train_set: &LabeledDataset, test_set: &LabeledDataset) -> Result<TrainOutcome> {
        let cfg = self.config;
        cfg.validate()?;
        check_dataset(&mlp, train_set, "training")?;
        check_dataset(&mlp, test_set, "test")?;
        if let Some(mask) = &cfg.plastic {
            mlp.set_plastic(mask)?;
        }
        if let StopOn::Group(g) = cfg.stop_on {
            if g >= self.groups.len() {
                return Err(Error::Config(format!("stop group {g} not configured")));
            }
        }
        let n = train_set.len();
        let mut memory = self.memory.unwrap_or_else(|| MistakeMemory::new(n));
        if memory.len() != n {
            return Err(Error::Shape(format!(
                "mistake memory has {} flags for {n} training samples",
                memory.len()
            )));
        }

        let mut metrics = RunMetrics::new(n);
        let eval_every = cfg.eval_every.unwrap_or(n.max(1) as u64);
        let plastic_params = mlp.plastic_param_count();
        let mut rng = rng::stream(cfg.shuffle_seed, Stream::Shuffle);
        let mut trace = ForwardTrace::for_network(&mlp);
        let mut scratch = StepScratch::default();
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let ctx = EvalContext { train_set, test_set, groups: &self.groups, config: cfg };

        for _ in 0..cfg.max_epochs {
            order.clear();
            order.extend(0..n);
            order.shuffle(&mut rng);
            for &k in &order {
                let label = train_set.labels()[k];
                let id = train_set.ids()[k];
                mlp.forward_into(train_set.sample(k), &mut trace)?;
                let predicted = predict(&trace);
                metrics.record_forward();
                if gate_decision(cfg.policy, id, predicted, label, &mut memory)? {
                    let l1 = mlp.sgd_step(&trace, label, cfg.lr, &mut scratch)?;
                    metrics.record_update(id, l1, plastic_params)?;
                }
                if metrics.forward_steps % eval_every == 0 {
                    let snap = ctx.snapshot(&mlp, &metrics, &memory)?;
                    let done = ctx.criterion_met(&snap);
                    metrics.snapshots.push(snap);
                    if done {
                        return Ok(finish(metrics, StopReason::CriterionReached, mlp, memory));
                    }
                }
            }
            metrics.epochs_completed += 1;
            let already = metrics.last_snapshot().is_some_and(|s| s.forward_steps == metrics.forward_steps);
            if !already {
                let snap = ctx.snapshot(&mlp, &metrics, &memory)?;
                let done = ctx.criterion_met(&snap);
                metrics.snapshots.push(snap);
                if done {
                    return Ok(finish(metrics, StopReason::CriterionReached, mlp, memory));
                }
            }
        }
        Ok(finish(metrics, StopReason::EpochBudgetExhausted, mlp, memory))
    }
}

fn finish(metrics: RunMetrics, stop_reason: StopReason, network: Mlp, memory: MistakeMemory) -> TrainOutcome {
    TrainOutcome { metrics, stop_reason, network, memory }
}

struct EvalContext<'a> {
    train_set: &'a LabeledDataset,
    test_set: &'a LabeledDataset,
    groups: &'a [Vec<usize>],
    config: &'a TrainConfig,
}

impl EvalContext<'_> {
    fn snapshot(&self, mlp: &Mlp, metrics: &RunMetrics, memory: &MistakeMemory) -> Result<Snapshot> {
        let train_accuracy = if self.config.eval_train {
            Some(evaluate(mlp, self.train_set)?.accuracy)
        } else {
            None
        };
        let test = evaluate(mlp, self.test_set)?;
        let n = self.train_set.len().max(1) as f64;
        Ok(Snapshot {
            forward_steps: metrics.forward_steps,
            update_steps: metrics.update_steps,
            epoch: metrics.forward_steps as f64 / n,
            train_accuracy,
            test_accuracy: test.accuracy,
            group_accuracy: self.groups.iter().map(|g| test.group_accuracy(g)).collect(),
            m1_energy: metrics.m1_energy,
            unique_mistakes: memory.unique_mistake_count(),
        })
    }

    fn criterion_met(&self, snap: &Snapshot) -> bool {
        let Some(target) = self.config.criterion else {
            return false;
        };
        let value = match self.config.stop_on {
            StopOn::Test => Some(snap.test_accuracy),
            StopOn::Group(g) => snap.group_accuracy[g],
        };
        value.is_some_and(|v| v >= target)
    }
}

pub fn train(mlp: Mlp, train_set: &LabeledDataset, test_set: &LabeledDataset, config: &TrainConfig) -> Result<TrainOutcome> {
    Trainer::new(config).run(mlp, train_set, test_set)
}

/// For each target, update steps at the first snapshot whose test accuracy reaches it.
pub fn steps_to_accuracy(snapshots: &[Snapshot], targets: &[f64]) -> Vec<Option<u64>> {
    steps_to_accuracy_by(snapshots, targets, |s| Some(s.test_accuracy))
}

/// As [`steps_to_accuracy`] with a caller-chosen accuracy (e.g. a class group).
pub fn steps_to_accuracy_by(
    snapshots: &[Snapshot],
    targets: &[f64],
    accuracy: impl Fn(&Snapshot) -> Option<f64>,
) -> Vec<Option<u64>> {
    targets
        .iter()
        .map(|&t| {
            snapshots
                .iter()
                .find(|s| accuracy(s).is_some_and(|a| a >= t))
                .map(|s| s.update_steps)
        })
        .collect()
}

/// Two-phase class-incremental scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementalConfig {
    pub pretrain_classes: Vec<usize>,
    pub new_classes: Vec<usize>,
    /// Phase 1; its criterion applies to old-class test accuracy.
    pub pretrain: TrainConfig,
    /// Phase 2 on the full dataset. Snapshot groups are `[old, new]`, so
    /// `StopOn::Group(1)` stops on new-class accuracy.
    pub continuation: TrainConfig,
    /// Freezes every layer but the output layer in phase 2, unless
    /// `continuation.plastic` gives an explicit mask.
    pub freeze_hidden_on_continue: bool,
    /// Start phase 2 with an all-false mistake memory instead of carrying
    /// phase-1 flags over.
    pub reset_memory_on_continue: bool,
}

impl IncrementalConfig {
    pub fn validate(&self, n_classes: usize) -> Result<()> {
        if self.pretrain_classes.is_empty() || self.new_classes.is_empty() {
            return Err(Error::Config("both class sets must be non-empty".into()));
        }
        if self.pretrain_classes.iter().any(|c| self.new_classes.contains(c)) {
            return Err(Error::Config("pretrain and new class sets overlap".into()));
        }
        if let Some(&c) = self.pretrain_classes.iter().chain(&self.new_classes).find(|&&c| c >= n_classes) {
            return Err(Error::Config(format!("class {c} out of range for {n_classes} classes")));
        }
        self.pretrain.validate()?;
        self.continuation.validate()
    }
}

#[derive(Debug, Clone)]
pub struct IncrementalOutcome {
    pub pretrain: TrainOutcome,
    /// Weights recorded at the end of phase 1.
    pub pretrained: Mlp,
    pub continuation: TrainOutcome,
}

pub const OLD_GROUP: usize = 0;
pub const NEW_GROUP: usize = 1;

/// Phase 1: train on the pretrain classes only, stopping on old-class test accuracy.
pub fn pretrain_phase(
    mlp: Mlp,
    full_train: &LabeledDataset,
    test_set: &LabeledDataset,
    config: &IncrementalConfig,
) -> Result<TrainOutcome> {
    config.validate(mlp.n_classes())?;
    let old_train = full_train.filter_classes(&config.pretrain_classes)?;
    let old_test = test_set.filter_classes(&config.pretrain_classes)?;
    Trainer::new(&config.pretrain)
        .with_groups(vec![config.pretrain_classes.clone()])
        .run(mlp, &old_train, &old_test)
}

/// Phase 2: continue from a phase-1 outcome on the full dataset, with the
/// freeze mask applied and the mistake memory carried over (or reset).
pub fn continue_phase(
    pretrain: &TrainOutcome,
    full_train: &LabeledDataset,
    test_set: &LabeledDataset,
    config: &IncrementalConfig,
) -> Result<TrainOutcome> {
    let mut net = pretrain.network.clone();
    config.validate(net.n_classes())?;
    if config.continuation.plastic.is_none() {
        let layers = net.layers().len();
        let mask: Vec<bool> = (0..layers)
            .map(|k| !config.freeze_hidden_on_continue || k + 1 == layers)
            .collect();
        net.set_plastic(&mask)?;
    }
    let memory = if config.reset_memory_on_continue {
        MistakeMemory::new(full_train.len())
    } else {
        // Phase-1 ids index the class-filtered view; map them back onto the full set.
        let old_train = full_train.filter_classes(&config.pretrain_classes)?;
        if old_train.len() != pretrain.memory.len() {
            return Err(Error::Shape(format!(
                "phase-1 memory has {} flags, pretrain subset has {} samples",
                pretrain.memory.len(),
                old_train.len()
            )));
        }
        pretrain.memory.extend_into(full_train.len(), old_train.source_ids())?
    };
    Trainer::new(&config.continuation)
        .with_groups(vec![config.pretrain_classes.clone(), config.new_classes.clone()])
        .with_memory(memory)
        .run(net, full_train, test_set)
}

pub fn incremental_train(
    mlp: Mlp,
    full_train: &LabeledDataset,
    test_set: &LabeledDataset,
    config: &IncrementalConfig,
) -> Result<IncrementalOutcome> {
    let pretrain = pretrain_phase(mlp, full_train, test_set, config)?;
    let continuation = continue_phase(&pretrain, full_train, test_set, config)?;
    let pretrained = pretrain.network.clone();
    Ok(IncrementalOutcome { pretrain, pretrained, continuation })
}
