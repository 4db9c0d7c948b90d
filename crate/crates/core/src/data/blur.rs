//! Separable Gaussian blur with dataset-level moment matching.

use super::LabeledDataset;
use crate::error::{Error, Result};

/// Normalized 1-D Gaussian of radius `ceil(3 * sigma)`. `sigma == 0` gives `[1.0]`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Config(format!("blur sigma must be finite and >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(vec![1.0]);
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|x| (-((x * x) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    Ok(k)
}

/// One separable pass along rows then columns, zero padding outside the image.
fn convolve_separable(img: &[f64], height: usize, width: usize, kernel: &[f64], tmp: &mut [f64], out: &mut [f64]) {
    let r = (kernel.len() / 2) as isize;
    let (h, w) = (height as isize, width as isize);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let xx = x + k as isize - r;
                if (0..w).contains(&xx) {
                    acc += kv * img[(y * w + xx) as usize];
                }
            }
            tmp[(y * w + x) as usize] = acc;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let yy = y + k as isize - r;
                if (0..h).contains(&yy) {
                    acc += kv * tmp[(yy * w + x) as usize];
                }
            }
            out[(y * w + x) as usize] = acc;
        }
    }
}

/// Blurs a single row-major image, without any intensity rescaling.
pub fn blur_image(img: &[f64], height: usize, width: usize, sigma: f64) -> Result<Vec<f64>> {
    if img.len() != height * width {
        return Err(Error::Shape(format!(
            "image of {} pixels is not {height}x{width}",
            img.len()
        )));
    }
    let kernel = gaussian_kernel(sigma)?;
    let mut tmp = vec![0.0; img.len()];
    let mut out = vec![0.0; img.len()];
    convolve_separable(img, height, width, &kernel, &mut tmp, &mut out);
    Ok(out)
}

/// Global mean and population standard deviation of all values.
pub fn pixel_moments(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Affinely rescales `values` in place so their moments become `(mean, std)`.
pub fn moment_match(values: &mut [f64], mean: f64, std: f64) {
    let (m, s) = pixel_moments(values);
    let scale = if s > 0.0 { std / s } else { 1.0 };
    for v in values.iter_mut() {
        *v = (*v - m) * scale + mean;
    }
}

/// Blurs every image, then matches the global pixel mean and standard
/// deviation of the result to those of the input dataset.
pub fn gaussian_blur(dataset: &LabeledDataset, sigma: f64, height: usize, width: usize) -> Result<LabeledDataset> {
    let kernel = gaussian_kernel(sigma)?;
    if height * width != dataset.dim() {
        return Err(Error::Shape(format!(
            "{height}x{width} images do not match feature width {}",
            dataset.dim()
        )));
    }
    if sigma == 0.0 {
        return Ok(dataset.clone());
    }
    let (mean, std) = pixel_moments(dataset.features());
    let mut features = vec![0.0; dataset.features().len()];
    let mut tmp = vec![0.0; dataset.dim()];
    for (src, dst) in dataset.samples().zip(features.chunks_exact_mut(dataset.dim())) {
        convolve_separable(src, height, width, &kernel, &mut tmp, dst);
    }
    moment_match(&mut features, mean, std);
    dataset.with_features(features)
}
