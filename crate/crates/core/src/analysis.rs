//! Post-run analysis: log-log power-law fits and update savings.

use crate::error::{Error, Result};
use crate::gating::GatePolicy;
use crate::metrics::{RunMetrics, Snapshot};
use crate::trainer::steps_to_accuracy_by;

/// `count ≈ exp(log_prefactor) * size^exponent`, fitted by OLS in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub log_prefactor: f64,
    /// Standard error of the slope; zero when only two points are given.
    pub exponent_stderr: f64,
    pub n_points: usize,
}

impl PowerLawFit {
    pub fn predict(&self, size: f64) -> f64 {
        (self.log_prefactor + self.exponent * size.ln()).exp()
    }
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(&(s, c)) = points.iter().find(|&&(s, c)| !(s > 0.0 && c > 0.0) || !s.is_finite() || !c.is_finite()) {
        return Err(Error::Fit(format!("non-positive or non-finite point ({s}, {c})")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx <= f64::EPSILON * n {
        return Err(Error::Fit("need at least two distinct sizes".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let exponent = sxy / sxx;
    let log_prefactor = y_mean - exponent * x_mean;
    let exponent_stderr = if points.len() > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - log_prefactor - exponent * x).powi(2))
            .sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(PowerLawFit { exponent, log_prefactor, exponent_stderr, n_points: points.len() })
}

/// Ratio of update steps needed by a gated run versus a baseline run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Savings {
    Ratio(f64),
    /// At least one run never reached the target.
    Unreached { gated: bool, baseline: bool },
    /// The baseline reached the target with zero updates.
    Undefined,
}

impl Savings {
    pub fn ratio(self) -> Option<f64> {
        match self {
            Savings::Ratio(r) => Some(r),
            _ => None,
        }
    }
}

pub fn savings_ratio(gated: &RunMetrics, baseline: &RunMetrics, target: f64) -> Savings {
    savings_ratio_by(&gated.snapshots, &baseline.snapshots, target, |s| Some(s.test_accuracy))
}

pub fn savings_ratio_by(
    gated: &[Snapshot],
    baseline: &[Snapshot],
    target: f64,
    accuracy: impl Fn(&Snapshot) -> Option<f64> + Copy,
) -> Savings {
    let g = steps_to_accuracy_by(gated, &[target], accuracy)[0];
    let b = steps_to_accuracy_by(baseline, &[target], accuracy)[0];
    match (g, b) {
        (Some(_), Some(0)) => Savings::Undefined,
        (Some(g), Some(b)) => Savings::Ratio(g as f64 / b as f64),
        (g, b) => Savings::Unreached { gated: g.is_none(), baseline: b.is_none() },
    }
}

/// One row of a sweep table: a (condition, policy, seed) triple.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Name of the swept variable, e.g. `lr`, `size`, `sigma`.
    pub condition: String,
    pub value: f64,
    pub policy: GatePolicy,
    pub seed: u64,
    pub targets: Vec<f64>,
    pub steps_to_targets: Vec<Option<u64>>,
    pub forward_steps: u64,
    pub update_steps: u64,
    pub epochs_completed: usize,
    pub m1_energy: f64,
    pub unique_mistakes: usize,
    pub normalized_updates: f64,
    pub weight_l1: f64,
    pub weight_l2: f64,
    pub final_test_accuracy: f64,
    pub stop_reason: String,
}
