use std::borrow::Cow;

use anyhow::Result;
use gatetrain_core::data::augment;
use gatetrain_core::trainer::{continue_phase, pretrain_phase, IncrementalConfig, StopOn, StopReason, NEW_GROUP, OLD_GROUP};
use gatetrain_core::{analysis::savings_ratio_by, fit_power_law, GatePolicy, Mlp, Snapshot, TrainConfig};

use super::{first_seed, load_data, nonempty, usage};
use crate::args::{policies, FreezeArg, IncrementalArgs};
use crate::output::{fmt_f64, fmt_opt, fmt_steps, write_runs, write_snapshots, write_table, UNREACHED};
use crate::runner::{ensure_dir, execute_from, layer_sizes, par_map, RunResult, RunSpec};

pub const DEFAULT_EVAL_EVERY: u64 = 500;

struct Variant {
    freeze: FreezeArg,
    augment: usize,
    result: RunResult,
}

fn old_acc(s: &Snapshot) -> Option<f64> {
    s.group_accuracy.get(OLD_GROUP).copied().flatten()
}

fn new_acc(s: &Snapshot) -> Option<f64> {
    s.group_accuracy.get(NEW_GROUP).copied().flatten()
}

pub fn run(a: &IncrementalArgs) -> Result<()> {
    nonempty(&a.policies, "--policies")?;
    nonempty(&a.freeze, "--freeze")?;
    nonempty(&a.augment, "--augment")?;
    if a.augment.contains(&0) {
        return Err(usage("--augment factors must be at least 1"));
    }
    let (base, test) = load_data(&a.data, first_seed(&a.seeds)?)?;
    let eval_every = Some(a.common.eval_every.unwrap_or(DEFAULT_EVAL_EVERY));
    let layers = layer_sizes(&base, &a.common.hidden);
    let dataset = a.data.dataset.name();

    let config_for = |seed: u64, policy: GatePolicy, freeze: FreezeArg, target: f64, reset: bool| IncrementalConfig {
        pretrain_classes: a.old_classes.clone(),
        new_classes: a.new_classes.clone(),
        pretrain: TrainConfig {
            lr: a.pretrain_lr,
            max_epochs: a.pretrain_epochs,
            criterion: Some(a.pretrain_criterion),
            stop_on: StopOn::Group(OLD_GROUP),
            eval_every,
            eval_train: false,
            shuffle_seed: seed,
            policy: a.pretrain_policy.into(),
            plastic: None,
        },
        continuation: TrainConfig {
            lr: a.lr,
            max_epochs: a.max_epochs,
            criterion: Some(target),
            stop_on: StopOn::Group(NEW_GROUP),
            eval_every,
            eval_train: a.common.eval_train,
            shuffle_seed: seed,
            policy,
            plastic: None,
        },
        freeze_hidden_on_continue: freeze == FreezeArg::Hidden,
        reset_memory_on_continue: reset,
    };

    let mut pretrain_runs: Vec<RunResult> = Vec::new();
    let mut variants: Vec<Variant> = Vec::new();
    let mut scaling: Vec<Variant> = Vec::new();
    for &seed in &a.seeds {
        let source = match a.base_size {
            Some(n) if n < base.len() => Cow::Owned(base.subset(n, seed)?),
            _ => Cow::Borrowed(&base),
        };
        for &factor in &a.augment {
            let full = if factor == 1 {
                Cow::Borrowed(source.as_ref())
            } else {
                let (h, w) = source
                    .image_shape()
                    .ok_or_else(|| usage(format!("--dataset {dataset} cannot be augmented")))?;
                Cow::Owned(augment(&source, factor, seed, h, w)?)
            };

            // Phase 1 is shared by every phase-2 variant of this seed and factor.
            let shared = config_for(seed, a.pretrain_policy.into(), FreezeArg::None, a.new_target, a.reset_memory);
            let spec = RunSpec::new("pretrain", ("augment", factor as f64), seed, layers.clone(), shared.pretrain.clone());
            let init = Mlp::new(&layers, seed)?;
            let old_train = full.filter_classes(&a.old_classes)?;
            let old_test = test.filter_classes(&a.old_classes)?;
            let pre = execute_from(spec, init, &old_train, &old_test, |_, mlp| pretrain_phase(mlp, &full, &test, &shared))?;
            if pre.outcome.stop_reason != StopReason::CriterionReached {
                eprintln!("warning: seed {seed} augment {factor}: pretraining stopped below the old-class criterion");
            }

            let mut jobs = Vec::new();
            for &freeze in &a.freeze {
                for &policy in &policies(&a.policies) {
                    jobs.push((freeze, policy, None));
                    if policy != GatePolicy::Always {
                        jobs.extend(a.scaling_sizes.iter().map(|&n| (freeze, policy, Some(n))));
                    }
                }
            }
            if let Some(&n) = a.scaling_sizes.iter().find(|&&n| n == 0 || n > full.len()) {
                return Err(usage(format!("scaling size {n} outside 1..={}", full.len())));
            }
            let done = par_map(a.common.jobs, jobs, |(freeze, policy, size)| {
                let (target, reset, prefix) = match size {
                    None => (a.new_target, a.reset_memory, format!("incremental-{}", freeze.name())),
                    Some(n) => (a.scaling_target, true, format!("incscale{n}-{}", freeze.name())),
                };
                let cfg = config_for(seed, policy, freeze, target, reset);
                let spec = RunSpec::new(&prefix, ("augment", factor as f64), seed, layers.clone(), cfg.continuation.clone());
                let start = pre.outcome.network.clone();
                let data = match size {
                    None => Cow::Borrowed(full.as_ref()),
                    Some(n) => Cow::Owned(full.subset(n, seed)?),
                };
                let r = execute_from(spec, start, &data, &test, |_, _| continue_phase(&pre.outcome, &data, &test, &cfg))?;
                Ok((size, Variant { freeze, augment: factor, result: r }))
            })?;
            for (size, v) in done {
                if size.is_some() { scaling.push(v) } else { variants.push(v) }
            }
            pretrain_runs.push(pre);
        }
    }

    let out = &a.common.out;
    ensure_dir(out)?;
    write_summary(out, &variants, a.new_target)?;
    write_savings(out, &variants, a.new_target)?;
    write_forgetting(out, &variants)?;
    if !scaling.is_empty() {
        write_scaling(out, &scaling)?;
    }

    let all: Vec<&RunResult> = pretrain_runs.iter().chain(variants.iter().map(|v| &v.result)).chain(scaling.iter().map(|v| &v.result)).collect();
    let records = all.iter().map(|r| r.record("incremental", dataset)).collect::<Result<Vec<_>>>()?;
    write_runs(&out.join("runs.csv"), &records)?;
    write_snapshots(
        &out.join("snapshots.csv"),
        all.iter().map(|r| (r.spec.run_id.as_str(), r.outcome.metrics.snapshots.as_slice())),
    )?;
    Ok(())
}

fn write_summary(out: &std::path::Path, variants: &[Variant], target: f64) -> Result<()> {
    let mut rows = Vec::new();
    for v in variants {
        let m = &v.result.outcome.metrics;
        let hit = m.snapshots.iter().find(|s| new_acc(s).is_some_and(|x| x >= target));
        let last = m.last_snapshot();
        rows.push(vec![
            v.result.spec.seed.to_string(),
            v.augment.to_string(),
            v.freeze.name().to_string(),
            v.result.spec.config.policy.to_string(),
            fmt_steps(hit.map(|s| s.update_steps)),
            fmt_steps(hit.map(|s| s.forward_steps)),
            m.forward_steps.to_string(),
            m.update_steps.to_string(),
            fmt_f64(m.m1_energy),
            v.result.outcome.memory.unique_mistake_count().to_string(),
            fmt_opt(last.and_then(old_acc)),
            fmt_opt(last.and_then(new_acc)),
            v.result.outcome.stop_reason.name().to_string(),
        ]);
    }
    write_table(
        &out.join("incremental.csv"),
        &[
            "seed",
            "augment",
            "freeze",
            "policy",
            "updates_to_target",
            "forward_steps_to_target",
            "forward_steps",
            "update_steps",
            "m1_energy",
            "unique_mistakes",
            "final_old_class_accuracy",
            "final_new_class_accuracy",
            "stop_reason",
        ],
        &rows,
    )
}

/// Gated versus ungated updates to the new-class target, per seed, factor and freeze setting.
fn write_savings(out: &std::path::Path, variants: &[Variant], target: f64) -> Result<()> {
    let mut rows = Vec::new();
    for base in variants.iter().filter(|v| v.result.spec.config.policy == GatePolicy::Always) {
        for gated in variants.iter().filter(|v| {
            v.result.spec.config.policy != GatePolicy::Always
                && v.result.spec.seed == base.result.spec.seed
                && v.augment == base.augment
                && v.freeze == base.freeze
        }) {
            let s = savings_ratio_by(
                &gated.result.outcome.metrics.snapshots,
                &base.result.outcome.metrics.snapshots,
                target,
                new_acc,
            );
            println!(
                "seed {} augment {} freeze {}: {} / always updates = {}",
                base.result.spec.seed,
                base.augment,
                base.freeze.name(),
                gated.result.spec.config.policy,
                s.ratio().map_or_else(|| UNREACHED.to_string(), |r| format!("{r:.3}"))
            );
            rows.push(vec![
                base.result.spec.seed.to_string(),
                base.augment.to_string(),
                base.freeze.name().to_string(),
                gated.result.spec.config.policy.to_string(),
                s.ratio().map_or_else(|| UNREACHED.to_string(), fmt_f64),
            ]);
        }
    }
    write_table(&out.join("savings.csv"), &["seed", "augment", "freeze", "policy", "update_ratio"], &rows)
}

/// Old-class accuracy of frozen and fully plastic runs side by side, at
/// every snapshot step both runs reached.
fn write_forgetting(out: &std::path::Path, variants: &[Variant]) -> Result<()> {
    let mut rows = Vec::new();
    for frozen in variants.iter().filter(|v| v.freeze == FreezeArg::Hidden) {
        let Some(plastic) = variants.iter().find(|v| {
            v.freeze == FreezeArg::None
                && v.augment == frozen.augment
                && v.result.spec.seed == frozen.result.spec.seed
                && v.result.spec.config.policy == frozen.result.spec.config.policy
        }) else {
            continue;
        };
        for fs in &frozen.result.outcome.metrics.snapshots {
            let Some(ps) = plastic.result.outcome.metrics.snapshots.iter().find(|s| s.forward_steps == fs.forward_steps) else {
                continue;
            };
            rows.push(vec![
                frozen.result.spec.seed.to_string(),
                frozen.augment.to_string(),
                frozen.result.spec.config.policy.to_string(),
                fs.forward_steps.to_string(),
                fmt_opt(old_acc(fs)),
                fmt_opt(old_acc(ps)),
            ]);
        }
    }
    write_table(
        &out.join("forgetting.csv"),
        &["seed", "augment", "policy", "forward_steps", "old_class_accuracy_frozen", "old_class_accuracy_plastic"],
        &rows,
    )
}

/// Unique mistakes against phase-2 training-set size, with a pooled power-law fit.
fn write_scaling(out: &std::path::Path, runs: &[Variant]) -> Result<()> {
    let rows: Vec<Vec<String>> = runs
        .iter()
        .map(|v| {
            let r = &v.result;
            vec![
                r.spec.seed.to_string(),
                v.augment.to_string(),
                v.freeze.name().to_string(),
                r.spec.config.policy.to_string(),
                r.train_size.to_string(),
                r.outcome.memory.unique_mistake_count().to_string(),
                r.outcome.metrics.update_steps.to_string(),
                r.outcome.metrics.forward_steps.to_string(),
                r.outcome.stop_reason.name().to_string(),
            ]
        })
        .collect();
    write_table(
        &out.join("incremental_scaling.csv"),
        &["seed", "augment", "freeze", "policy", "size", "unique_mistakes", "update_steps", "forward_steps", "stop_reason"],
        &rows,
    )?;
    let mut groups: Vec<(FreezeArg, GatePolicy)> = runs.iter().map(|v| (v.freeze, v.result.spec.config.policy)).collect();
    groups.dedup();
    groups.sort_by_key(|&(f, p)| (f.name(), p));
    groups.dedup();
    let mut fit_rows = Vec::new();
    for (freeze, policy) in groups {
        let points: Vec<(f64, f64)> = runs
            .iter()
            .filter(|v| v.freeze == freeze && v.result.spec.config.policy == policy)
            .map(|v| (v.result.train_size as f64, v.result.outcome.memory.unique_mistake_count() as f64))
            .collect();
        if let Ok(f) = fit_power_law(&points) {
            println!("freeze {} {policy}: unique mistakes ~ S^{:.3} ± {:.3}", freeze.name(), f.exponent, f.exponent_stderr);
            fit_rows.push(vec![
                freeze.name().to_string(),
                policy.to_string(),
                f.n_points.to_string(),
                fmt_f64(f.exponent),
                fmt_f64(f.exponent_stderr),
                fmt_f64(f.log_prefactor),
            ]);
        }
    }
    write_table(
        &out.join("incremental_fit.csv"),
        &["freeze", "policy", "n_points", "exponent", "exponent_stderr", "log_prefactor"],
        &fit_rows,
    )
}
