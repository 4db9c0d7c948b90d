use anyhow::Result;
use gatetrain_core::data::gaussian_blur;
use gatetrain_core::trainer::StopOn;
use gatetrain_core::{savings_ratio, GatePolicy, TrainConfig};

use super::{first_seed, load_data, nonempty, usage};
use crate::args::{policies, BlurArgs};
use crate::output::{fmt_f64, fmt_opt, write_runs, write_snapshots, write_table, UNREACHED};
use crate::runner::{ensure_dir, execute, layer_sizes, par_map, RunResult, RunSpec};

/// A tenth of an MNIST epoch.
pub const DEFAULT_EVAL_EVERY: u64 = 6000;

pub fn run(a: &BlurArgs) -> Result<()> {
    nonempty(&a.sigmas, "--sigmas")?;
    nonempty(&a.policies, "--policies")?;
    let (train, test) = load_data(&a.data, first_seed(&a.seeds)?)?;
    let Some((h, w)) = train.image_shape() else {
        return Err(usage(format!("--dataset {} has no image shape to blur", a.data.dataset.name())));
    };
    let layers = layer_sizes(&train, &a.common.hidden);

    // One sigma at a time keeps a single blurred copy in memory.
    let mut results: Vec<RunResult> = Vec::new();
    for &sigma in &a.sigmas {
        let btrain = gaussian_blur(&train, sigma, h, w)?;
        let btest = gaussian_blur(&test, sigma, h, w)?;
        let mut specs = Vec::new();
        for &policy in &policies(&a.policies) {
            for &seed in &a.seeds {
                let config = TrainConfig {
                    lr: a.lr,
                    max_epochs: a.max_epochs,
                    criterion: Some(a.criterion),
                    stop_on: StopOn::Test,
                    eval_every: Some(a.common.eval_every.unwrap_or(DEFAULT_EVAL_EVERY)),
                    eval_train: a.common.eval_train,
                    shuffle_seed: seed,
                    policy,
                    plastic: None,
                };
                specs.push(RunSpec::new("blur", ("sigma", sigma), seed, layers.clone(), config));
            }
        }
        results.extend(par_map(a.common.jobs, specs, |s| execute(s, &btrain, &btest))?);
    }

    let out = &a.common.out;
    ensure_dir(out)?;
    let mut rows = Vec::new();
    for r in &results {
        let m = &r.outcome.metrics;
        let hit = m.snapshots.iter().find(|s| s.test_accuracy >= a.criterion);
        let rec = r.record("blur", a.data.dataset.name())?;
        rows.push(vec![
            fmt_f64(r.spec.condition.1),
            rec.policy.clone(),
            r.spec.seed.to_string(),
            hit.map_or_else(|| UNREACHED.to_string(), |s| fmt_f64(s.epoch)),
            hit.map_or_else(|| UNREACHED.to_string(), |s| s.update_steps.to_string()),
            m.forward_steps.to_string(),
            m.update_steps.to_string(),
            fmt_f64(m.m1_energy),
            rec.unique_mistakes.to_string(),
            fmt_f64(rec.weight_l1),
            fmt_f64(rec.weight_l2),
            fmt_f64(rec.final_test_accuracy),
            rec.stop_reason.to_string(),
        ]);
    }
    write_table(
        &out.join("blur.csv"),
        &[
            "sigma",
            "policy",
            "seed",
            "epochs_to_criterion",
            "updates_to_criterion",
            "forward_steps",
            "update_steps",
            "m1_energy",
            "unique_mistakes",
            "weight_l1",
            "weight_l2",
            "final_test_accuracy",
            "stop_reason",
        ],
        &rows,
    )?;

    // Each gated policy against the ungated baseline at the same sigma and seed.
    let mut ratio_rows = Vec::new();
    for base in results.iter().filter(|r| r.spec.config.policy == GatePolicy::Always) {
        let base_norm = base.record("blur", "")?.weight_l1;
        for gated in results.iter().filter(|r| {
            r.spec.config.policy != GatePolicy::Always
                && r.spec.seed == base.spec.seed
                && r.spec.condition.1 == base.spec.condition.1
        }) {
            let savings = savings_ratio(&gated.outcome.metrics, &base.outcome.metrics, a.criterion);
            let gated_norm = gated.record("blur", "")?.weight_l1;
            ratio_rows.push(vec![
                fmt_f64(base.spec.condition.1),
                base.spec.seed.to_string(),
                gated.spec.config.policy.to_string(),
                savings.ratio().map_or_else(|| UNREACHED.to_string(), fmt_f64),
                fmt_opt((base_norm > 0.0).then(|| gated_norm / base_norm)),
            ]);
            println!(
                "sigma {}: {} / always update ratio {}",
                base.spec.condition.1,
                gated.spec.config.policy,
                savings.ratio().map_or_else(|| UNREACHED.to_string(), |v| format!("{v:.3}"))
            );
        }
    }
    write_table(
        &out.join("ratios.csv"),
        &["sigma", "seed", "policy", "update_ratio", "weight_l1_ratio"],
        &ratio_rows,
    )?;
    let records = results
        .iter()
        .map(|r| r.record("blur", a.data.dataset.name()))
        .collect::<Result<Vec<_>>>()?;
    write_runs(&out.join("runs.csv"), &records)?;
    write_snapshots(
        &out.join("snapshots.csv"),
        results.iter().map(|r| (r.spec.run_id.as_str(), r.outcome.metrics.snapshots.as_slice())),
    )?;
    Ok(())
}
