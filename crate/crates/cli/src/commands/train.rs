use anyhow::Result;
use gatetrain_core::trainer::StopOn;
use gatetrain_core::TrainConfig;

use super::{load_data, usage};
use crate::args::TrainArgs;
use crate::output::{write_runs, write_samples, write_snapshots};
use crate::runner::{ensure_dir, execute, layer_sizes, RunSpec};

pub fn run(a: &TrainArgs) -> Result<()> {
    let (train, test) = load_data(&a.data, a.seed)?;
    let sizes = layer_sizes(&train, &a.common.hidden);
    let n_layers = sizes.len() - 1;
    let plastic = if a.freeze.is_empty() {
        None
    } else {
        if let Some(&bad) = a.freeze.iter().find(|&&k| k >= n_layers) {
            return Err(usage(format!("--freeze {bad}: network has {n_layers} weight layers")));
        }
        Some((0..n_layers).map(|k| !a.freeze.contains(&k)).collect())
    };
    let config = TrainConfig {
        lr: a.lr,
        max_epochs: a.max_epochs,
        criterion: a.criterion,
        stop_on: StopOn::Test,
        eval_every: a.common.eval_every,
        eval_train: a.common.eval_train,
        shuffle_seed: a.seed,
        policy: a.policy.into(),
        plastic,
    };
    let spec = RunSpec::new("train", ("lr", a.lr), a.seed, sizes, config);
    let result = execute(spec, &train, &test)?;

    let out = &a.common.out;
    ensure_dir(out)?;
    let record = result.record("train", a.data.dataset.name())?;
    write_runs(&out.join("runs.csv"), std::slice::from_ref(&record))?;
    let id = record.run_id.as_str();
    write_snapshots(&out.join("snapshots.csv"), [(id, result.outcome.metrics.snapshots.as_slice())])?;
    write_samples(&out.join("samples.csv"), [(id, &result.outcome, &train)])?;
    println!(
        "{id}: {} after {} presentations, {} updates, test accuracy {:.4}",
        record.stop_reason, record.forward_steps, record.update_steps, record.final_test_accuracy
    );
    Ok(())
}
