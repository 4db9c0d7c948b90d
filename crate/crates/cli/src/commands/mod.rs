pub mod blur;
pub mod gradcheck;
pub mod incremental;
pub mod scaling;
pub mod sweep;
pub mod train;
pub mod viz2d;

use anyhow::Result;
use gatetrain_core::LabeledDataset;

use crate::args::DataArgs;
use crate::datasets;
use crate::UsageError;

/// Loads train/test sets and applies `--train-limit` / `--test-limit`.
/// `seed` drives the limit subsets and generated datasets.
pub(crate) fn load_data(args: &DataArgs, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = datasets::load(args.dataset, &args.data_dir, seed)?;
    let train = datasets::limit(train, args.train_limit, seed)?;
    let test = datasets::limit(test, args.test_limit, seed)?;
    Ok((train, test))
}

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub(crate) fn first_seed(seeds: &[u64]) -> Result<u64> {
    seeds.first().copied().ok_or_else(|| usage("--seeds must not be empty"))
}

pub(crate) fn nonempty<T>(items: &[T], flag: &str) -> Result<()> {
    if items.is_empty() {
        return Err(usage(format!("{flag} must not be empty")));
    }
    Ok(())
}
