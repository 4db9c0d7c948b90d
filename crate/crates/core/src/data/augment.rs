//! Mirror-and-shift augmentation for image datasets.

use rand::Rng;

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

const MAX_SHIFT: i64 = 2;

pub fn mirror_horizontal(img: &[f64], height: usize, width: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(img.len());
    for y in 0..height {
        out.extend(img[y * width..(y + 1) * width].iter().rev());
    }
    out
}

/// Translates the image by `(dx, dy)` pixels; uncovered pixels become zero.
pub fn shift_image(img: &[f64], height: usize, width: usize, dx: i64, dy: i64) -> Vec<f64> {
    let mut out = vec![0.0; img.len()];
    let (h, w) = (height as i64, width as i64);
    for y in 0..h {
        let sy = y - dy;
        if !(0..h).contains(&sy) {
            continue;
        }
        for x in 0..w {
            let sx = x - dx;
            if (0..w).contains(&sx) {
                out[(y * w + x) as usize] = img[(sy * w + sx) as usize];
            }
        }
    }
    out
}

/// Each sample becomes `factor` consecutive samples: the original, then
/// `factor - 1` copies that are independently mirrored (p = 1/2) and shifted
/// by up to two pixels per axis. Every output sample gets a fresh id.
pub fn augment(dataset: &LabeledDataset, factor: usize, seed: u64, height: usize, width: usize) -> Result<LabeledDataset> {
    if factor == 0 {
        return Err(Error::Config("augmentation factor must be >= 1".into()));
    }
    if height * width != dataset.dim() {
        return Err(Error::Shape(format!(
            "{height}x{width} images do not match feature width {}",
            dataset.dim()
        )));
    }
    if factor == 1 {
        return Ok(dataset.clone());
    }
    let mut rng = rng::stream(seed, Stream::Augment);
    let n = dataset.len() * factor;
    let mut features = Vec::with_capacity(n * dataset.dim());
    let mut labels = Vec::with_capacity(n);
    let mut source_ids = Vec::with_capacity(n);
    for (k, img) in dataset.samples().enumerate() {
        for copy in 0..factor {
            if copy == 0 {
                features.extend_from_slice(img);
            } else {
                let mirrored;
                let base = if rng.random_bool(0.5) {
                    mirrored = mirror_horizontal(img, height, width);
                    &mirrored[..]
                } else {
                    img
                };
                let dx = rng.random_range(-MAX_SHIFT..=MAX_SHIFT);
                let dy = rng.random_range(-MAX_SHIFT..=MAX_SHIFT);
                features.extend(shift_image(base, height, width, dx, dy));
            }
            labels.push(dataset.labels()[k]);
            source_ids.push(dataset.ids()[k]);
        }
    }
    LabeledDataset::with_ids(dataset.dim(), features, labels, (0..n).collect(), source_ids, dataset.n_classes())?
        .with_image_shape(height, width)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(v: usize) -> Vec<f64> {
        (0..12).map(|p| ((p * 5 + v) % 7) as f64).collect()
    }

    #[test]
    fn mirror_is_an_involution() {
        let img = image(3);
        let m = mirror_horizontal(&img, 3, 4);
        assert_ne!(m, img);
        assert_eq!(mirror_horizontal(&m, 3, 4), img);
    }

    #[test]
    fn shift_moves_and_zero_pads() {
        let img: Vec<f64> = (1..=9).map(f64::from).collect();
        assert_eq!(shift_image(&img, 3, 3, 1, 0), vec![0., 1., 2., 0., 4., 5., 0., 7., 8.]);
        assert_eq!(shift_image(&img, 3, 3, 0, -1), vec![4., 5., 6., 7., 8., 9., 0., 0., 0.]);
        assert_eq!(shift_image(&img, 3, 3, 0, 0), img);
    }

    #[test]
    fn factor_one_is_identity_and_factor_ten_multiplies() {
        let features: Vec<f64> = (0..6).flat_map(image).collect();
        let ds = LabeledDataset::new(12, features, vec![0, 1, 2, 0, 1, 2], 3).unwrap();
        assert_eq!(augment(&ds, 1, 0, 3, 4).unwrap(), ds);
        let big = augment(&ds, 10, 0, 3, 4).unwrap();
        assert_eq!(big.len(), 60);
        assert_eq!(big.ids(), (0..60).collect::<Vec<_>>().as_slice());
        for k in 0..60 {
            assert_eq!(big.labels()[k], ds.labels()[k / 10]);
            assert_eq!(big.source_ids()[k], k / 10);
        }
        assert_eq!(big.sample(30), ds.sample(3));
        assert_eq!(big, augment(&ds, 10, 0, 3, 4).unwrap());
    }
}
