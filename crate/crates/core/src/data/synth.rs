//! Two interleaving half-moons: a small 2-D task with a curved boundary.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use super::{pixel_moments, LabeledDataset};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

const NOISE_STD: f64 = 0.2;

/// `n` points, two classes (sizes differ by at most one), Gaussian noise of
/// std 0.2, then each axis standardized to zero mean and unit variance.
pub fn make_2d_task(n: usize, seed: u64) -> Result<LabeledDataset> {
    if n < 2 {
        return Err(Error::Config(format!("2-D task needs at least 2 samples, got {n}")));
    }
    let mut rng = rng::stream(seed, Stream::Task);
    let noise = Normal::new(0.0, NOISE_STD).expect("valid std");
    let n_upper = n.div_ceil(2);
    let n_lower = n - n_upper;

    let mut points: Vec<([f64; 2], usize)> = Vec::with_capacity(n);
    for k in 0..n_upper {
        let t = PI * k as f64 / (n_upper.max(2) - 1) as f64;
        points.push(([t.cos(), t.sin()], 0));
    }
    for k in 0..n_lower {
        let t = PI * k as f64 / (n_lower.max(2) - 1) as f64;
        points.push(([1.0 - t.cos(), 0.5 - t.sin()], 1));
    }
    for (p, _) in points.iter_mut() {
        p[0] += noise.sample(&mut rng);
        p[1] += noise.sample(&mut rng);
    }
    points.shuffle(&mut rng);

    for axis in 0..2 {
        let column: Vec<f64> = points.iter().map(|(p, _)| p[axis]).collect();
        let (mean, std) = pixel_moments(&column);
        for (p, _) in points.iter_mut() {
            p[axis] = (p[axis] - mean) / std;
        }
    }

    let features = points.iter().flat_map(|(p, _)| *p).collect();
    let labels = points.iter().map(|&(_, l)| l).collect();
    LabeledDataset::new(2, features, labels, 2)
}
