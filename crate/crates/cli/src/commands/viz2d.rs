use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use gatetrain_core::data::make_2d_task;
use gatetrain_core::network::ForwardTrace;
use gatetrain_core::trainer::StopOn;
use gatetrain_core::{LabeledDataset, Mlp, TrainConfig};

use super::nonempty;
use crate::args::{policies, Viz2dArgs};
use crate::output::{write_runs, write_samples, write_snapshots};
use crate::runner::{ensure_dir, execute, layer_sizes, RunResult, RunSpec};
use crate::svg::{heat_color, Axis, Svg};

/// Held-out points are drawn from the same task under a shifted seed.
const TEST_SEED_OFFSET: u64 = 0x5eed_7e57;

pub fn run(a: &Viz2dArgs) -> Result<()> {
    nonempty(&a.policies, "--policies")?;
    let train = make_2d_task(a.samples, a.seed)?;
    let test = make_2d_task(a.samples, a.seed.wrapping_add(TEST_SEED_OFFSET))?;
    let layers = layer_sizes(&train, &a.hidden);
    let mut results = Vec::new();
    for policy in policies(&a.policies) {
        let config = TrainConfig {
            lr: a.lr,
            max_epochs: a.epochs,
            criterion: None,
            stop_on: StopOn::Test,
            eval_every: None,
            eval_train: true,
            shuffle_seed: a.seed,
            policy,
            plastic: None,
        };
        results.push(execute(RunSpec::new("viz2d", ("lr", a.lr), a.seed, layers.clone(), config), &train, &test)?);
    }

    ensure_dir(&a.out)?;
    let records = results.iter().map(|r| r.record("viz2d", "moons")).collect::<Result<Vec<_>>>()?;
    write_runs(&a.out.join("runs.csv"), &records)?;
    write_snapshots(
        &a.out.join("snapshots.csv"),
        results.iter().map(|r| (r.spec.run_id.as_str(), r.outcome.metrics.snapshots.as_slice())),
    )?;
    write_samples(&a.out.join("samples.csv"), results.iter().map(|r| (r.spec.run_id.as_str(), &r.outcome, &train)))?;
    for r in &results {
        let path = a.out.join(format!("viz2d_{}.svg", r.spec.config.policy));
        write_plot(&path, r, &train)?;
        let idle = r.outcome.metrics.per_sample_updates.iter().filter(|&&c| c == 0).count();
        println!(
            "{}: {idle}/{} samples never triggered an update, train accuracy {:.3}",
            r.spec.config.policy,
            train.len(),
            r.final_train_accuracy
        );
    }
    Ok(())
}

const CLASS_FILL: [&str; 2] = ["#9ecae1", "#fdd0a2"];
const CLASS_STROKE: [&str; 2] = ["#2166ac", "#b35806"];
const GRID: usize = 80;

/// Decision regions as a background grid, then every training point:
/// filled by how often it triggered an update, transparent if never.
fn write_plot(path: &Path, r: &RunResult, data: &LabeledDataset) -> Result<()> {
    let (w, h) = (520.0, 520.0);
    let (lo, hi) = (20.0, 500.0);
    let xa = Axis::fit(data.samples().map(|p| p[0]), lo, hi);
    let ya = Axis::fit(data.samples().map(|p| p[1]), hi, lo);
    let net: &Mlp = &r.outcome.network;
    let mut svg = Svg::new(w, h);
    let mut trace = ForwardTrace::for_network(net);
    let ((x0, x1), (y0, y1)) = (xa.bounds(), ya.bounds());
    let cell = (hi - lo) / GRID as f64;
    for gy in 0..GRID {
        for gx in 0..GRID {
            let x = x0 + (gx as f64 + 0.5) / GRID as f64 * (x1 - x0);
            let y = y0 + (gy as f64 + 0.5) / GRID as f64 * (y1 - y0);
            let class = net.classify(&[x, y], &mut trace)?;
            let (px, py) = (xa.map(x) - cell / 2.0, ya.map(y) - cell / 2.0);
            svg.rect(px, py, cell + 0.5, cell + 0.5, CLASS_FILL[class % 2], 0.45);
        }
    }
    let counts = &r.outcome.metrics.per_sample_updates;
    let max = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    for k in 0..data.len() {
        let p = data.sample(k);
        let class = data.labels()[k] % 2;
        let c = counts[data.ids()[k]];
        let (fill, opacity) = if c == 0 {
            ("#ffffff".to_string(), 0.0)
        } else {
            (heat_color((c as f64).ln_1p() / max.ln_1p()), 0.95)
        };
        svg.circle(xa.map(p[0]), ya.map(p[1]), 4.0, &fill, opacity, Some(CLASS_STROKE[class]));
    }
    let used = counts.iter().filter(|&&c| c > 0).count();
    svg.text(
        w / 2.0,
        14.0,
        12.0,
        "middle",
        &format!("{}: {used}/{} samples triggered updates", r.spec.config.policy, data.len()),
    );
    fs::write(path, svg.finish()).with_context(|| format!("cannot write {}", path.display()))
}
