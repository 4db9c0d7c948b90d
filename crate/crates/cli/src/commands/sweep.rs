use anyhow::Result;
use gatetrain_core::trainer::StopOn;
use gatetrain_core::TrainConfig;

use super::{first_seed, load_data, nonempty};
use crate::args::{policies, SweepLrArgs};
use crate::output::{write_runs, write_snapshots, write_sweep};
use crate::runner::{ensure_dir, execute, layer_sizes, par_map, RunSpec};

/// Snapshot cadence when `--eval-every` is not given.
pub const DEFAULT_EVAL_EVERY: u64 = 1000;

pub fn run(a: &SweepLrArgs) -> Result<()> {
    nonempty(&a.lrs, "--lrs")?;
    nonempty(&a.policies, "--policies")?;
    let (train, test) = load_data(&a.data, first_seed(&a.seeds)?)?;
    let sizes = layer_sizes(&train, &a.common.hidden);
    let criterion = a.targets.iter().copied().reduce(f64::max);

    let mut specs = Vec::new();
    for &lr in &a.lrs {
        for &policy in &policies(&a.policies) {
            for &seed in &a.seeds {
                let config = TrainConfig {
                    lr,
                    max_epochs: a.max_epochs,
                    criterion,
                    stop_on: StopOn::Test,
                    eval_every: Some(a.common.eval_every.unwrap_or(DEFAULT_EVAL_EVERY)),
                    eval_train: a.common.eval_train,
                    shuffle_seed: seed,
                    policy,
                    plastic: None,
                };
                specs.push(RunSpec::new("sweep", ("lr", lr), seed, sizes.clone(), config));
            }
        }
    }
    let results = par_map(a.common.jobs, specs, |s| execute(s, &train, &test))?;

    let out = &a.common.out;
    ensure_dir(out)?;
    let rows = results.iter().map(|r| r.sweep_row(&a.targets)).collect::<Result<Vec<_>>>()?;
    write_sweep(&out.join("sweep.csv"), &rows, &a.targets)?;
    let records = results
        .iter()
        .map(|r| r.record("sweep-lr", a.data.dataset.name()))
        .collect::<Result<Vec<_>>>()?;
    write_runs(&out.join("runs.csv"), &records)?;
    write_snapshots(
        &out.join("snapshots.csv"),
        results.iter().map(|r| (r.spec.run_id.as_str(), r.outcome.metrics.snapshots.as_slice())),
    )?;
    for r in &records {
        println!("{}: {} updates, {} ({:.4})", r.run_id, r.update_steps, r.stop_reason, r.final_test_accuracy);
    }
    Ok(())
}
