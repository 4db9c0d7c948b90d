//! Per-run efficiency counters: update steps, M1 energy, snapshots.

use crate::error::{Error, Result};
use crate::network::Mlp;

/// One evaluation point during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub forward_steps: u64,
    pub update_steps: u64,
    /// Fractional epochs elapsed at the time of the snapshot.
    pub epoch: f64,
    /// `None` when train-set evaluation is switched off for the run.
    pub train_accuracy: Option<f64>,
    pub test_accuracy: f64,
    /// Test accuracy restricted to each configured class group; `None` for a
    /// group with no test samples.
    pub group_accuracy: Vec<Option<f64>>,
    pub m1_energy: f64,
    pub unique_mistakes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Training presentations; evaluation passes are not counted.
    pub forward_steps: u64,
    pub update_steps: u64,
    /// Cumulative L1 norm of all applied parameter deltas.
    pub m1_energy: f64,
    pub epochs_completed: usize,
    pub snapshots: Vec<Snapshot>,
    pub per_sample_updates: Vec<u64>,
    /// Sum over update events of the number of plastic parameters at that event.
    pub plastic_param_updates: u128,
}

impl RunMetrics {
    pub fn new(n_samples: usize) -> Self {
        Self {
            forward_steps: 0,
            update_steps: 0,
            m1_energy: 0.0,
            epochs_completed: 0,
            snapshots: Vec::new(),
            per_sample_updates: vec![0; n_samples],
            plastic_param_updates: 0,
        }
    }

    pub fn record_forward(&mut self) {
        self.forward_steps += 1;
    }

    pub fn record_update(&mut self, sample_id: usize, delta_l1: f64, plastic_params: usize) -> Result<()> {
        if !(delta_l1 >= 0.0) {
            return Err(Error::Internal(format!("update L1 must be non-negative, got {delta_l1}")));
        }
        let len = self.per_sample_updates.len();
        let slot = self
            .per_sample_updates
            .get_mut(sample_id)
            .ok_or(Error::Index { index: sample_id, len })?;
        *slot += 1;
        self.update_steps += 1;
        self.m1_energy += delta_l1;
        self.plastic_param_updates += plastic_params as u128;
        Ok(())
    }

    /// Parameter writes divided by network size and dataset size; reads as
    /// epoch-equivalents of ungated training on a fully plastic network.
    pub fn normalized_updates(&self, total_params: usize, dataset_size: usize) -> Result<f64> {
        if total_params == 0 || dataset_size == 0 {
            return Err(Error::Config("normalization needs positive sizes".into()));
        }
        Ok(self.plastic_param_updates as f64 / (total_params as f64 * dataset_size as f64))
    }

    pub fn last_snapshot(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }
}

/// Norms of `final - initial` over every weight and bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightNormReport {
    pub l1: f64,
    pub l2: f64,
}

pub fn weight_norms(final_net: &Mlp, initial: &Mlp) -> Result<WeightNormReport> {
    if final_net.layer_sizes() != initial.layer_sizes() {
        return Err(Error::Shape(format!(
            "architectures differ: {:?} vs {:?}",
            final_net.layer_sizes(),
            initial.layer_sizes()
        )));
    }
    let (mut l1, mut sq) = (0.0, 0.0);
    for (a, b) in final_net.params().zip(initial.params()) {
        let d = a - b;
        l1 += d.abs();
        sq += d * d;
    }
    Ok(WeightNormReport { l1, l2: sq.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_update_accumulates() {
        let mut m = RunMetrics::new(4);
        m.record_update(0, 0.35, 10).unwrap();
        assert_eq!((m.update_steps, m.m1_energy), (1, 0.35));
        m.record_update(1, 0.15, 10).unwrap();
        assert_eq!(m.update_steps, 2);
        assert!((m.m1_energy - 0.50).abs() < 1e-15);
        m.record_update(1, 0.0, 10).unwrap();
        assert_eq!(m.update_steps, 3);
        assert!((m.m1_energy - 0.50).abs() < 1e-15);
        assert_eq!(m.per_sample_updates, vec![1, 2, 0, 0]);
        assert!(matches!(m.record_update(0, -1e-3, 10), Err(Error::Internal(_))));
    }

    #[test]
    fn normalized_updates_reads_in_epochs() {
        let n = 50;
        let mut full = RunMetrics::new(n);
        let mut half = RunMetrics::new(n);
        for id in 0..n {
            full.record_update(id, 0.1, 100).unwrap();
            half.record_update(id, 0.1, 50).unwrap();
        }
        assert_eq!(full.normalized_updates(100, n).unwrap(), 1.0);
        assert_eq!(half.normalized_updates(100, n).unwrap(), 0.5);
        assert_eq!(RunMetrics::new(n).normalized_updates(100, n).unwrap(), 0.0);
    }

    #[test]
    fn weight_norm_cases() {
        let init = Mlp::new(&[2, 2], 1).unwrap();
        assert_eq!(weight_norms(&init, &init).unwrap(), WeightNormReport { l1: 0.0, l2: 0.0 });

        let mut one = init.clone();
        one.layers_mut()[0].biases_mut()[1] -= 3.0;
        let r = weight_norms(&one, &init).unwrap();
        assert!((r.l1 - 3.0).abs() < 1e-12 && (r.l2 - 3.0).abs() < 1e-12);

        let mut two = init.clone();
        two.layers_mut()[0].biases_mut()[0] += 3.0;
        two.layers_mut()[0].weights_mut()[2] += 4.0;
        let r = weight_norms(&two, &init).unwrap();
        assert!((r.l1 - 7.0).abs() < 1e-12 && (r.l2 - 5.0).abs() < 1e-12);

        let other = Mlp::new(&[2, 3], 1).unwrap();
        assert!(matches!(weight_norms(&other, &init), Err(Error::Shape(_))));
    }
}
