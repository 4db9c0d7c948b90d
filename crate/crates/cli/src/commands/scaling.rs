use std::fs;

use anyhow::{Context, Result};
use gatetrain_core::trainer::StopOn;
use gatetrain_core::{fit_power_law, GatePolicy, PowerLawFit, TrainConfig};

use super::{first_seed, load_data, nonempty, usage};
use crate::args::{policies, ScalingArgs};
use crate::datasets::DatasetKind;
use crate::output::{fmt_f64, write_runs, write_snapshots, write_sweep, write_table};
use crate::runner::{ensure_dir, execute, layer_sizes, par_map, RunResult, RunSpec};
use crate::svg::{draw_axes, Axis, Svg, MARGIN};

pub const DEFAULT_EVAL_EVERY: u64 = 1000;

fn default_sizes(kind: DatasetKind) -> Vec<usize> {
    match kind {
        DatasetKind::Mnist => vec![4_000, 8_000, 16_000, 32_000, 60_000],
        DatasetKind::Emnist => vec![5_000, 10_000, 15_000, 30_000, 60_000, 120_000, 180_000, 240_000],
        DatasetKind::Moons => vec![50, 100, 200, 400],
    }
}

fn default_criterion(kind: DatasetKind) -> f64 {
    match kind {
        DatasetKind::Mnist => 0.97,
        _ => 0.98,
    }
}

pub fn run(a: &ScalingArgs) -> Result<()> {
    nonempty(&a.policies, "--policies")?;
    let (full, test) = load_data(&a.data, first_seed(&a.seeds)?)?;
    let sizes = if a.sizes.is_empty() { default_sizes(a.data.dataset) } else { a.sizes.clone() };
    if let Some(&s) = sizes.iter().find(|&&s| s == 0 || s > full.len()) {
        return Err(usage(format!("size {s} outside 1..={}", full.len())));
    }
    let criterion = a.criterion.unwrap_or_else(|| default_criterion(a.data.dataset));
    let layers = layer_sizes(&full, &a.common.hidden);

    let mut specs = Vec::new();
    for &size in &sizes {
        for &policy in &policies(&a.policies) {
            for &seed in &a.seeds {
                let config = TrainConfig {
                    lr: a.lr,
                    max_epochs: a.max_epochs,
                    criterion: Some(criterion),
                    stop_on: StopOn::Test,
                    eval_every: Some(a.common.eval_every.unwrap_or(DEFAULT_EVAL_EVERY)),
                    eval_train: a.common.eval_train,
                    shuffle_seed: seed,
                    policy,
                    plastic: None,
                };
                specs.push(RunSpec::new("scaling", ("size", size as f64), seed, layers.clone(), config));
            }
        }
    }
    let results = par_map(a.common.jobs, specs, |spec| {
        let size = spec.condition.1 as usize;
        if size == full.len() {
            execute(spec, &full, &test)
        } else {
            let subset = full.subset(size, spec.seed)?;
            execute(spec, &subset, &test)
        }
    })?;

    let out = &a.common.out;
    ensure_dir(out)?;
    let targets = [criterion];
    let rows = results.iter().map(|r| r.sweep_row(&targets)).collect::<Result<Vec<_>>>()?;
    write_sweep(&out.join("scaling.csv"), &rows, &targets)?;
    let records = results
        .iter()
        .map(|r| r.record("scaling", a.data.dataset.name()))
        .collect::<Result<Vec<_>>>()?;
    write_runs(&out.join("runs.csv"), &records)?;
    write_snapshots(
        &out.join("snapshots.csv"),
        results.iter().map(|r| (r.spec.run_id.as_str(), r.outcome.metrics.snapshots.as_slice())),
    )?;

    let fits = fit_by_policy(&results, &policies(&a.policies))?;
    let fit_rows: Vec<Vec<String>> = fits
        .iter()
        .map(|(p, f)| {
            vec![
                p.to_string(),
                f.n_points.to_string(),
                fmt_f64(f.exponent),
                fmt_f64(f.exponent_stderr),
                fmt_f64(f.log_prefactor),
            ]
        })
        .collect();
    write_table(
        &out.join("fit.csv"),
        &["policy", "n_points", "exponent", "exponent_stderr", "log_prefactor"],
        &fit_rows,
    )?;
    let svg = plot(&results, &fits);
    let path = out.join("scaling.svg");
    fs::write(&path, svg).with_context(|| format!("cannot write {}", path.display()))?;
    for (p, f) in &fits {
        println!("{p}: unique mistakes ~ S^{:.3} ± {:.3} ({} points)", f.exponent, f.exponent_stderr, f.n_points);
    }
    Ok(())
}

/// Pools every seed's (size, unique mistakes) point per policy.
fn fit_by_policy(results: &[RunResult], policies: &[GatePolicy]) -> Result<Vec<(GatePolicy, PowerLawFit)>> {
    let mut fits = Vec::new();
    for &p in policies {
        let points: Vec<(f64, f64)> = results
            .iter()
            .filter(|r| r.spec.config.policy == p)
            .map(|r| (r.spec.condition.1, r.outcome.memory.unique_mistake_count() as f64))
            .collect();
        // Too few sizes, or a zero count, leaves this policy without a fit.
        if let Ok(fit) = fit_power_law(&points) {
            fits.push((p, fit));
        }
    }
    Ok(fits)
}

const COLORS: [&str; 3] = ["#1b9e77", "#d95f02", "#7570b3"];

/// Log-log scatter of unique mistakes against training-set size, with fitted lines.
fn plot(results: &[RunResult], fits: &[(GatePolicy, PowerLawFit)]) -> String {
    let (w, h) = (520.0, 400.0);
    let points: Vec<(GatePolicy, f64, f64)> = results
        .iter()
        .filter(|r| r.outcome.memory.unique_mistake_count() > 0)
        .map(|r| {
            let size = r.spec.condition.1;
            (r.spec.config.policy, size.log10(), (r.outcome.memory.unique_mistake_count() as f64).log10())
        })
        .collect();
    let xa = Axis::fit(points.iter().map(|p| p.1), MARGIN, w - MARGIN / 2.0);
    let ya = Axis::fit(points.iter().map(|p| p.2), h - MARGIN, MARGIN / 2.0);
    let mut svg = Svg::new(w, h);
    draw_axes(&mut svg, &xa, &ya, w, h, "log10 training-set size", "log10 unique");
    let color = |p: GatePolicy| COLORS[GatePolicy::ALL.iter().position(|&q| q == p).unwrap_or(0) % COLORS.len()];
    for &(p, x, y) in &points {
        svg.circle(xa.map(x), ya.map(y), 3.5, color(p), 0.8, None);
    }
    let (x_lo, x_hi) = xa.bounds();
    for (k, (p, f)) in fits.iter().enumerate() {
        let y = |x: f64| (f.log_prefactor + f.exponent * x * std::f64::consts::LN_10) / std::f64::consts::LN_10;
        svg.line(xa.map(x_lo), ya.map(y(x_lo)), xa.map(x_hi), ya.map(y(x_hi)), color(*p), true);
        let label = format!("{p}: exponent {:.3} ± {:.3}", f.exponent, f.exponent_stderr);
        svg.text(MARGIN + 10.0, MARGIN / 2.0 + 14.0 * (k as f64 + 1.0), 11.0, "start", &label);
    }
    svg.finish()
}
