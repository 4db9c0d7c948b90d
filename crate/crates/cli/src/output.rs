//! CSV schemas. Every file starts with a header row; field order is fixed.
//! Floats are written with 17 significant digits; absent values are `NA`,
//! accuracy targets a run never reached are `unreached`.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use gatetrain_core::{LabeledDataset, Snapshot, SweepRow, TrainOutcome};

pub const NA: &str = "NA";
pub const UNREACHED: &str = "unreached";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), fmt_f64)
}

pub fn fmt_steps(v: Option<u64>) -> String {
    v.map_or_else(|| UNREACHED.to_string(), |s| s.to_string())
}

pub fn fmt_list<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

/// Summary of one training run, with enough configuration to reproduce it.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run_id: String,
    pub subcommand: &'static str,
    pub dataset: String,
    pub condition: String,
    pub policy: String,
    pub lr: f64,
    pub max_epochs: usize,
    pub criterion: Option<f64>,
    pub eval_every: Option<u64>,
    pub seed: u64,
    pub layer_sizes: Vec<usize>,
    pub plastic: Vec<bool>,
    pub train_size: usize,
    pub test_size: usize,
    pub stop_reason: &'static str,
    pub forward_steps: u64,
    pub update_steps: u64,
    pub epochs_completed: usize,
    pub m1_energy: f64,
    pub unique_mistakes: usize,
    pub normalized_updates: f64,
    pub weight_l1: f64,
    pub weight_l2: f64,
    pub final_train_accuracy: f64,
    pub final_test_accuracy: f64,
}

const RUN_HEADER: [&str; 25] = [
    "run_id",
    "subcommand",
    "dataset",
    "condition",
    "policy",
    "lr",
    "max_epochs",
    "criterion",
    "eval_every",
    "seed",
    "layer_sizes",
    "plastic",
    "train_size",
    "test_size",
    "stop_reason",
    "forward_steps",
    "update_steps",
    "epochs_completed",
    "m1_energy",
    "unique_mistakes",
    "normalized_updates",
    "weight_l1",
    "weight_l2",
    "final_train_accuracy",
    "final_test_accuracy",
];

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

pub fn write_runs(path: &Path, runs: &[RunRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RUN_HEADER)?;
    for r in runs {
        let plastic: Vec<u8> = r.plastic.iter().map(|&p| u8::from(p)).collect();
        w.write_record([
            r.run_id.clone(),
            r.subcommand.to_string(),
            r.dataset.clone(),
            r.condition.clone(),
            r.policy.clone(),
            fmt_f64(r.lr),
            r.max_epochs.to_string(),
            fmt_opt(r.criterion),
            r.eval_every.map_or_else(|| "epoch".to_string(), |e| e.to_string()),
            r.seed.to_string(),
            fmt_list(&r.layer_sizes),
            fmt_list(&plastic),
            r.train_size.to_string(),
            r.test_size.to_string(),
            r.stop_reason.to_string(),
            r.forward_steps.to_string(),
            r.update_steps.to_string(),
            r.epochs_completed.to_string(),
            fmt_f64(r.m1_energy),
            r.unique_mistakes.to_string(),
            fmt_f64(r.normalized_updates),
            fmt_f64(r.weight_l1),
            fmt_f64(r.weight_l2),
            fmt_f64(r.final_train_accuracy),
            fmt_f64(r.final_test_accuracy),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `group_accuracy[0]` / `[1]` land in the old/new class columns when present.
pub fn write_snapshots<'a>(path: &Path, runs: impl IntoIterator<Item = (&'a str, &'a [Snapshot])>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "run_id",
        "forward_steps",
        "update_steps",
        "epoch",
        "train_accuracy",
        "test_accuracy",
        "old_class_accuracy",
        "new_class_accuracy",
        "m1_energy",
        "unique_mistakes",
    ])?;
    for (run_id, snaps) in runs {
        for s in snaps {
            let group = |g: usize| fmt_opt(s.group_accuracy.get(g).copied().flatten());
            w.write_record([
                run_id.to_string(),
                s.forward_steps.to_string(),
                s.update_steps.to_string(),
                fmt_f64(s.epoch),
                fmt_opt(s.train_accuracy),
                fmt_f64(s.test_accuracy),
                group(0),
                group(1),
                fmt_f64(s.m1_energy),
                s.unique_mistakes.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per training sample: whether it was ever misclassified and how
/// many updates it triggered. 2-D samples also carry their coordinates.
pub fn write_samples<'a>(
    path: &Path,
    runs: impl IntoIterator<Item = (&'a str, &'a TrainOutcome, &'a LabeledDataset)>,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["run_id", "id", "source_id", "label", "x", "y", "ever_mistaken", "update_count"])?;
    for (run_id, outcome, data) in runs {
        let flags = outcome.memory.flags();
        for k in 0..data.len() {
            let id = data.ids()[k];
            let (x, y) = if data.dim() == 2 {
                (fmt_f64(data.sample(k)[0]), fmt_f64(data.sample(k)[1]))
            } else {
                (NA.to_string(), NA.to_string())
            };
            w.write_record([
                run_id.to_string(),
                id.to_string(),
                data.source_ids()[k].to_string(),
                data.labels()[k].to_string(),
                x,
                y,
                u8::from(flags[id]).to_string(),
                outcome.metrics.per_sample_updates[id].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep(path: &Path, rows: &[SweepRow], targets: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    let mut header: Vec<String> = ["condition", "value", "policy", "seed"].map(String::from).to_vec();
    header.extend(targets.iter().map(|t| format!("steps_to_{t}")));
    header.extend(
        [
            "forward_steps",
            "update_steps",
            "epochs_completed",
            "m1_energy",
            "unique_mistakes",
            "normalized_updates",
            "weight_l1",
            "weight_l2",
            "final_test_accuracy",
            "stop_reason",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.condition.clone(), fmt_f64(r.value), r.policy.to_string(), r.seed.to_string()];
        rec.extend(r.steps_to_targets.iter().map(|&s| fmt_steps(s)));
        rec.extend([
            r.forward_steps.to_string(),
            r.update_steps.to_string(),
            r.epochs_completed.to_string(),
            fmt_f64(r.m1_energy),
            r.unique_mistakes.to_string(),
            fmt_f64(r.normalized_updates),
            fmt_f64(r.weight_l1),
            fmt_f64(r.weight_l2),
            fmt_f64(r.final_test_accuracy),
            r.stop_reason.clone(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Arbitrary table with a fixed header, for per-command summaries.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_significant_digits() {
        let s = fmt_f64(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        let third = 1.0 / 3.0;
        assert_eq!(fmt_f64(third).parse::<f64>().unwrap().to_bits(), third.to_bits());
    }

    #[test]
    fn absent_values() {
        assert_eq!(fmt_opt(None), NA);
        assert_eq!(fmt_steps(None), UNREACHED);
        assert_eq!(fmt_steps(Some(12)), "12");
        assert_eq!(fmt_list(&[784, 200, 10]), "784;200;10");
    }
}
