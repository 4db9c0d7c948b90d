//! Fixtures shared by the benchmarks.

use gatetrain_core::LabeledDataset;

/// MNIST-shaped synthetic digits: ~20% of pixels lit, like real MNIST.
pub fn sparse_images(n: usize, seed: u64) -> LabeledDataset {
    let dim = 28 * 28;
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as u32
    };
    let mut features = vec![0.0; n * dim];
    let mut labels = Vec::with_capacity(n);
    for k in 0..n {
        let label = (next() % 10) as usize;
        labels.push(label);
        for p in 0..dim {
            if next() % 5 == 0 {
                features[k * dim + p] = f64::from(next() % 256) / 255.0;
            }
        }
    }
    LabeledDataset::new(dim, features, labels, 10)
        .and_then(|d| d.with_image_shape(28, 28))
        .expect("valid fixture")
}
