//! Locating dataset files on disk.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use gatetrain_core::data::{load_idx, make_2d_task};
use gatetrain_core::LabeledDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    /// MNIST digits (60k train / 10k test).
    Mnist,
    /// EMNIST-Digits (240k train / 40k test).
    Emnist,
    /// Two interleaving half-moons in 2-D.
    Moons,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Mnist => "mnist",
            DatasetKind::Emnist => "emnist",
            DatasetKind::Moons => "moons",
        }
    }

    fn file_names(self) -> [&'static str; 4] {
        match self {
            DatasetKind::Mnist => [
                "train-images-idx3-ubyte",
                "train-labels-idx1-ubyte",
                "t10k-images-idx3-ubyte",
                "t10k-labels-idx1-ubyte",
            ],
            DatasetKind::Emnist => [
                "emnist-digits-train-images-idx3-ubyte",
                "emnist-digits-train-labels-idx1-ubyte",
                "emnist-digits-test-images-idx3-ubyte",
                "emnist-digits-test-labels-idx1-ubyte",
            ],
            DatasetKind::Moons => unreachable!("generated, not loaded"),
        }
    }
}

/// `<root>/<name>/` if it exists, else `<root>/`.
fn dataset_dir(root: &Path, kind: DatasetKind) -> PathBuf {
    let nested = root.join(kind.name());
    if nested.is_dir() {
        nested
    } else {
        root.to_path_buf()
    }
}

/// Samples in the generated 2-D train and test sets.
pub const MOONS_SIZE: usize = 500;
const MOONS_TEST_SEED_OFFSET: u64 = 0x5eed_7e57;

pub fn load(kind: DatasetKind, root: &Path, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    if kind == DatasetKind::Moons {
        let train = make_2d_task(MOONS_SIZE, seed)?;
        let test = make_2d_task(MOONS_SIZE, seed.wrapping_add(MOONS_TEST_SEED_OFFSET))?;
        return Ok((train, test));
    }
    let dir = dataset_dir(root, kind);
    let [tri, trl, tei, tel] = kind.file_names().map(|f| dir.join(f));
    let train = load_idx(&tri, &trl).with_context(|| format!("loading {} training set", kind.name()))?;
    let test = load_idx(&tei, &tel).with_context(|| format!("loading {} test set", kind.name()))?;
    Ok((train, test))
}

/// Optional deterministic down-sampling for quick runs.
pub fn limit(data: LabeledDataset, max: Option<usize>, seed: u64) -> Result<LabeledDataset> {
    match max {
        Some(m) if m < data.len() => Ok(data.subset(m, seed)?),
        _ => Ok(data),
    }
}
