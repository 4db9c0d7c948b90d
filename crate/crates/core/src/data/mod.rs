//! Labeled datasets and the transformations the experiments need.

mod augment;
mod blur;
mod idx;
mod synth;

pub use augment::{augment, mirror_horizontal, shift_image};
pub use blur::{blur_image, gaussian_blur, gaussian_kernel, moment_match, pixel_moments};
pub use idx::{load_idx, parse_idx_images, parse_idx_labels, IdxHeader, IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC};
pub use synth::make_2d_task;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Fixed-width real-valued samples with integer class labels.
///
/// Sample `k` has id `ids[k]`; ids are a permutation of `0..len`, so they
/// double as indices into per-sample arrays such as the mistake memory.
/// `source_ids[k]` is the id of the sample this one was derived from in the
/// parent dataset (itself, for freshly loaded or generated data).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    ids: Vec<usize>,
    source_ids: Vec<usize>,
    n_classes: usize,
    image_shape: Option<(usize, usize)>,
}

impl LabeledDataset {
    /// Builds a dataset with ids `0..n` mapping onto themselves.
    pub fn new(dim: usize, features: Vec<f64>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let n = labels.len();
        Self::with_ids(dim, features, labels, (0..n).collect(), (0..n).collect(), n_classes)
    }

    pub fn with_ids(
        dim: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
        ids: Vec<usize>,
        source_ids: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        let n = labels.len();
        if dim == 0 {
            return Err(Error::Shape("feature dimension must be positive".into()));
        }
        if features.len() != n * dim {
            return Err(Error::Shape(format!(
                "{} feature values for {n} samples of width {dim}",
                features.len()
            )));
        }
        if ids.len() != n || source_ids.len() != n {
            return Err(Error::Shape(format!(
                "{} ids / {} source ids for {n} samples",
                ids.len(),
                source_ids.len()
            )));
        }
        let mut seen = vec![false; n];
        for &id in &ids {
            if id >= n || std::mem::replace(&mut seen[id], true) {
                return Err(Error::Input(format!("ids must be a permutation of 0..{n}; bad id {id}")));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::Input(format!("label {bad} not below n_classes {n_classes}")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite feature value".into()));
        }
        Ok(Self { dim, features, labels, ids, source_ids, n_classes, image_shape: None })
    }

    pub fn with_image_shape(mut self, height: usize, width: usize) -> Result<Self> {
        if height * width != self.dim {
            return Err(Error::Shape(format!(
                "image {height}x{width} does not match feature width {}",
                self.dim
            )));
        }
        self.image_shape = Some((height, width));
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn image_shape(&self) -> Option<(usize, usize)> {
        self.image_shape
    }

    #[inline]
    pub fn sample(&self, k: usize) -> &[f64] {
        &self.features[k * self.dim..(k + 1) * self.dim]
    }

    pub fn samples(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.features.chunks_exact(self.dim)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn source_ids(&self) -> &[usize] {
        &self.source_ids
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Keeps the samples at `positions` (in that order), re-basing ids to
    /// `0..positions.len()` and recording the parent ids as sources.
    pub fn select(&self, positions: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(positions.len() * self.dim);
        let mut labels = Vec::with_capacity(positions.len());
        let mut source_ids = Vec::with_capacity(positions.len());
        for &p in positions {
            if p >= self.len() {
                return Err(Error::Index { index: p, len: self.len() });
            }
            features.extend_from_slice(self.sample(p));
            labels.push(self.labels[p]);
            source_ids.push(self.ids[p]);
        }
        let n = labels.len();
        let mut out =
            Self::with_ids(self.dim, features, labels, (0..n).collect(), source_ids, self.n_classes)?;
        out.image_shape = self.image_shape;
        Ok(out)
    }

    /// Uniform random subset without replacement, deterministic in `seed`.
    pub fn subset(&self, size: usize, seed: u64) -> Result<Self> {
        if size > self.len() {
            return Err(Error::Config(format!(
                "subset of {size} requested from {} samples",
                self.len()
            )));
        }
        let mut rng = rng::stream(seed, Stream::Subset);
        let positions = index::sample(&mut rng, self.len(), size).into_vec();
        self.select(&positions)
    }

    /// Samples whose label is in `classes`, in original order.
    pub fn filter_classes(&self, classes: &[usize]) -> Result<Self> {
        let positions: Vec<usize> =
            (0..self.len()).filter(|&k| classes.contains(&self.labels[k])).collect();
        self.select(&positions)
    }

    /// Same samples, labels and ids with replaced feature values.
    pub(crate) fn with_features(&self, features: Vec<f64>) -> Result<Self> {
        let mut out = Self::with_ids(
            self.dim,
            features,
            self.labels.clone(),
            self.ids.clone(),
            self.source_ids.clone(),
            self.n_classes,
        )?;
        out.image_shape = self.image_shape;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> LabeledDataset {
        let features = (0..n * 2).map(|v| v as f64).collect();
        let labels = (0..n).map(|k| k % 3).collect();
        LabeledDataset::new(2, features, labels, 3).unwrap()
    }

    #[test]
    fn constructor_checks_invariants() {
        assert!(LabeledDataset::new(2, vec![0.0; 3], vec![0, 1], 2).is_err());
        assert!(LabeledDataset::new(1, vec![0.0, 1.0], vec![0, 2], 2).is_err());
        assert!(LabeledDataset::new(1, vec![0.0, f64::NAN], vec![0, 1], 2).is_err());
        assert!(LabeledDataset::with_ids(1, vec![0.0, 1.0], vec![0, 1], vec![0, 0], vec![0, 1], 2)
            .is_err());
    }

    #[test]
    fn full_size_subset_is_a_permutation() {
        let ds = toy(50);
        let sub = ds.subset(50, 3).unwrap();
        let mut src = sub.source_ids().to_vec();
        src.sort_unstable();
        assert_eq!(src, (0..50).collect::<Vec<_>>());
        assert_eq!(sub.ids(), (0..50).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn subset_is_deterministic_and_without_replacement() {
        let ds = toy(100);
        let a = ds.subset(10, 8).unwrap();
        assert_eq!(a, ds.subset(10, 8).unwrap());
        let mut src = a.source_ids().to_vec();
        src.sort_unstable();
        src.dedup();
        assert_eq!(src.len(), 10);
        for k in 0..a.len() {
            let s = a.source_ids()[k];
            assert_eq!(a.sample(k), ds.sample(s));
            assert_eq!(a.labels()[k], ds.labels()[s]);
        }
        assert!(matches!(ds.subset(101, 1), Err(Error::Config(_))));
    }

    #[test]
    fn nested_subsets_are_deterministic() {
        let ds = toy(200);
        let run = || ds.subset(120, 5).unwrap().subset(30, 5).unwrap();
        assert_eq!(run(), run());
    }

    #[test]
    fn class_filter_keeps_class_count_and_maps_back() {
        let ds = toy(30);
        let f = ds.filter_classes(&[0, 2]).unwrap();
        assert_eq!(f.n_classes(), 3);
        assert_eq!(f.len(), 20);
        assert!(f.labels().iter().all(|&l| l != 1));
        assert!(f.source_ids().iter().all(|&s| ds.labels()[s] != 1));
    }
}
